"""
Announcement times: planning period, dynamism targeting and static requests.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config.models import MAX_PLANNING_PERIOD, MIN_PLANNING_PERIOD, InstanceConfig
from ..metrics.dynamism import deviation_step, deviation_terms, rho_of
from ..sampling.rng import RngStream

logger = logging.getLogger(__name__)

DYNAMISM_TOLERANCE = 0.02


@dataclass
class TimeStampPlan:
    """Time stamps chosen for a dynamism target, and how close they came."""

    timestamps: List[float] = field(default_factory=list)
    target: Optional[float] = None
    achieved: Optional[float] = None
    iterations: int = 0

    @property
    def reached(self) -> bool:
        if self.target is None or self.achieved is None:
            return True
        return abs(self.achieved - self.target) <= DYNAMISM_TOLERANCE


def planning_period(cfg: InstanceConfig) -> Optional[Tuple[float, float]]:
    """
    Planning period declared by a configuration.

    The min/max_planning_period parameters when both are declared; otherwise
    [loc, loc + scale] of a uniform pdf on the time-stamp attribute; None
    when neither applies.
    """
    low, high = cfg.parameter(MIN_PLANNING_PERIOD), cfg.parameter(MAX_PLANNING_PERIOD)
    if low is not None and high is not None:
        return float(low.value), float(high.value)
    attribute = cfg.timestamp_attribute
    if attribute is not None and attribute.pdf is not None and attribute.pdf.family == "uniform":
        return float(attribute.pdf.loc), float(attribute.pdf.loc + attribute.pdf.scale)
    return None


@dataclass
class _Move:
    """Re-evaluated deviation terms of one proposed burst move."""

    deltas: Dict[int, float]
    start: int
    sigmas: List[float]
    sigma_bars: List[float]
    lambda_: float
    eta: float


class _DeviationTracker:
    """
    Deviation sums of a sorted stamp sequence under single-stamp moves.

    Moving stamp k changes the interarrival times k-1 and k; their deviations
    carry forward until a chain reset, so a move re-evaluates only the terms
    up to the first one that comes out unchanged.
    """

    def __init__(self, stamps: np.ndarray, theta: float):
        self.theta = theta
        self.deltas = [float(d) for d in np.diff(stamps)]
        self.sigmas, self.sigma_bars = deviation_terms(self.deltas, theta)
        self.lambda_ = float(sum(self.sigmas))
        self.eta = float(sum(self.sigma_bars))

    @staticmethod
    def rho(lambda_: float, eta: float) -> float:
        if eta <= 0:
            return 1.0
        return min(1.0, max(0.0, 1.0 - lambda_ / eta))

    def propose(self, k: int, before: float, after: Optional[float]) -> Tuple[float, _Move]:
        """
        Dynamism after stamp k moves, without applying the move.

        Args:
            k: Index of the moved stamp, >= 1
            before: New interarrival time from stamp k-1 to stamp k
            after: New interarrival time from stamp k to stamp k+1; None for the last stamp
        """
        changed = {k - 1: before}
        if after is not None:
            changed[k] = after
        start = k - 1
        previous = self.sigmas[start - 1] if start > 0 else 0.0
        sigmas: List[float] = []
        sigma_bars: List[float] = []
        for j in range(start, len(self.deltas)):
            if j not in changed and previous == self.sigmas[j - 1]:
                break
            sigma, sigma_bar = deviation_step(changed.get(j, self.deltas[j]), self.theta, previous, first=j == 0)
            sigmas.append(sigma)
            sigma_bars.append(sigma_bar)
            previous = sigma
        end = start + len(sigmas)
        lambda_ = self.lambda_ + sum(sigmas) - sum(self.sigmas[start:end])
        eta = self.eta + sum(sigma_bars) - sum(self.sigma_bars[start:end])
        return self.rho(lambda_, eta), _Move(changed, start, sigmas, sigma_bars, lambda_, eta)

    def apply(self, move: _Move) -> None:
        for j, delta in move.deltas.items():
            self.deltas[j] = delta
        end = move.start + len(move.sigmas)
        self.sigmas[move.start : end] = move.sigmas
        self.sigma_bars[move.start : end] = move.sigma_bars
        self.lambda_, self.eta = move.lambda_, move.eta


def _round(value, integer: bool):
    return np.floor(value + 0.5) if integer else value


def assign_time_stamps(
    n: int,
    period: Tuple[float, float],
    target_rho: float,
    rng: RngStream,
    integer: bool = False,
) -> TimeStampPlan:
    """
    Sorted time stamps whose dynamism is close to a target.

    Stamps start evenly spaced at the perfect interarrival time
    theta = T_e / n, which has dynamism 1. Each burst move then pulls a
    uniformly chosen stamp toward its predecessor by a uniformly chosen
    fraction of their gap; a move is kept only when it brings the dynamism
    closer to the target. The search stops within DYNAMISM_TOLERANCE of the
    target or after 10 * n moves, returning the closest stamps found. A
    target of 0 collapses every stamp onto one instant. Stamps are finally
    shifted by a random offset that keeps them inside (ts_min, ts_max].

    Args:
        n: Number of time stamps, >= 2
        period: Planning period (ts_min, ts_max)
        target_rho: Target dynamism in [0, 1]
        rng: Stream to draw from
        integer: Round stamps to whole seconds while searching

    Returns:
        TimeStampPlan with the stamps and the dynamism they achieve
    """
    if n < 2:
        raise ValueError(f"Dynamism targeting needs at least 2 requests, got {n}")
    if not 0.0 <= target_rho <= 1.0:
        raise ValueError(f"Dynamism target must be in [0, 1], got {target_rho}")
    ts_min, ts_max = float(period[0]), float(period[1])
    if ts_max <= ts_min:
        raise ValueError(f"Planning period [{ts_min}, {ts_max}] is empty")

    theta = (ts_max - ts_min) / n
    iterations = 0
    if target_rho == 0.0:
        stamps = np.full(n, _round(ts_min + theta, integer), dtype=float)
    else:
        stamps = _round(ts_min + theta * np.arange(1, n + 1), integer).astype(float)
        tracker = _DeviationTracker(stamps, theta)
        rho = tracker.rho(tracker.lambda_, tracker.eta)
        while abs(rho - target_rho) > DYNAMISM_TOLERANCE and iterations < 10 * n:
            iterations += 1
            k = rng.integers(1, n)
            moved = float(_round(stamps[k] - rng.random() * (stamps[k] - stamps[k - 1]), integer))
            if moved == stamps[k]:
                continue
            after = stamps[k + 1] - moved if k + 1 < n else None
            candidate, move = tracker.propose(k, moved - stamps[k - 1], after)
            if abs(candidate - target_rho) < abs(rho - target_rho):
                tracker.apply(move)
                stamps[k] = moved
                rho = candidate

    slack = max(0.0, ts_max - stamps[-1])
    offset = rng.uniform(0.0, slack) if slack > 0 else 0.0
    if integer:
        offset = float(np.floor(offset))
    stamps = np.minimum(stamps + offset, ts_max)

    achieved = rho_of(np.diff(stamps), theta)
    plan = TimeStampPlan(
        timestamps=[float(s) for s in stamps], target=target_rho, achieved=achieved, iterations=iterations
    )
    if not plan.reached:
        logger.warning(f"Dynamism target {target_rho:.2f} not reached after {iterations} moves, best {achieved:.3f}")
    logger.debug(f"Time stamps for dynamism {target_rho}: {achieved:.4f} after {iterations} moves")
    return plan


def apply_static_probability(timestamp: float, p: float, rng: RngStream) -> Tuple[float, bool]:
    """
    Turn a request static with probability p.

    Returns:
        (time stamp, is_static); a static request's time stamp is 0
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"static probability must be in [0, 1], got {p}")
    if rng.bernoulli(p):
        return 0, True
    return timestamp, False


