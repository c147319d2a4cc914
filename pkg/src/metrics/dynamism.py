"""
Degree of dynamism of an instance.

Only dynamic requests count: those announced strictly after the start of the
planning period. Their interarrival times are compared with the perfect
interarrival time theta = T_e / |R_d|; short gaps (bursts) accumulate a
deviation that carries a share of the previous deviation forward. The
deviation sum lambda is normalised by eta, the deviation of the scenario in
which every request arrives at once, and rho = 1 - lambda / eta.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..utils.exceptions import MetricsError, TooFewRequestsError, UnsortedInputError

logger = logging.getLogger(__name__)


@dataclass
class DynamismReport:
    """
    Dynamism of one instance.

    Attributes:
        theta: Perfect interarrival time (seconds)
        deltas: Interarrival times of the dynamic requests
        sigmas: Deviation of every interarrival time
        lambda_: Total deviation
        sigma_bars: Deviation of every interarrival time in the worst case
        eta: Total worst-case deviation
        rho: Dynamism in [0, 1]
        dynamic_count: Number of dynamic requests
    """

    theta: float
    deltas: List[float] = field(default_factory=list)
    sigmas: List[float] = field(default_factory=list)
    lambda_: float = 0.0
    sigma_bars: List[float] = field(default_factory=list)
    eta: float = 0.0
    rho: float = 1.0
    dynamic_count: int = 0


def deviation_terms(deltas: Sequence[float], theta: float) -> Tuple[List[float], List[float]]:
    """
    Per-interarrival deviations and worst-case deviations.

    Args:
        deltas: Interarrival times in arrival order
        theta: Perfect interarrival time, > 0

    Returns:
        (sigmas, sigma_bars), both as long as `deltas`
    """
    sigmas: List[float] = []
    sigma_bars: List[float] = []
    previous = 0.0
    for k, delta in enumerate(deltas):
        sigma, sigma_bar = deviation_step(delta, theta, previous, first=k == 0)
        sigmas.append(sigma)
        sigma_bars.append(sigma_bar)
        previous = sigma
    return sigmas, sigma_bars


def deviation_step(delta: float, theta: float, previous: float, first: bool) -> Tuple[float, float]:
    """Deviation and worst-case deviation of one interarrival time given the previous deviation."""
    if delta >= theta:
        return 0.0, theta
    gap = theta - delta
    carried = 0.0 if first else gap / theta * previous
    return gap + carried, theta + carried


def rho_of(deltas: Sequence[float], theta: float) -> float:
    """Dynamism of a sequence of interarrival times; 1.0 when there are none."""
    sigmas, sigma_bars = deviation_terms(deltas, theta)
    eta = sum(sigma_bars)
    if eta <= 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - sum(sigmas) / eta))


def dynamic_timestamps(timestamps: Sequence[float], period_start: float) -> np.ndarray:
    """Time stamps announced strictly after the start of the planning period."""
    values = np.asarray(timestamps, dtype=float)
    return values[values > period_start]


def dynamism(
    timestamps: Sequence[float], period: Tuple[float, float], all_dynamic: bool = False
) -> DynamismReport:
    """
    Measure the dynamism of an instance.

    Args:
        timestamps: Announcement times of all requests, sorted non-decreasing.
            Static requests (at or before the period start) are ignored.
        period: Planning period (ts_min, ts_max) in seconds
        all_dynamic: Count every request as dynamic, including those announced
            at the period start. Used when the period is inferred from the
            time stamps themselves.

    Returns:
        DynamismReport with every intermediate term

    Raises:
        UnsortedInputError: Time stamps are not in non-decreasing order
        TooFewRequestsError: Fewer than two dynamic requests
        MetricsError: Empty planning period or a time stamp after its end
    """
    ts_min, ts_max = float(period[0]), float(period[1])
    length = ts_max - ts_min
    if length <= 0:
        raise MetricsError(f"Planning period [{ts_min}, {ts_max}] is empty")

    values = np.asarray(timestamps, dtype=float)
    if values.size > 1 and np.any(np.diff(values) < 0):
        raise UnsortedInputError("Time stamps must be sorted in non-decreasing order")
    if values.size and values[-1] > ts_max:
        raise MetricsError(f"Time stamp {values[-1]} lies after the end of the planning period ({ts_max})")

    dynamic = values if all_dynamic else dynamic_timestamps(values, ts_min)
    if dynamic.size < 2:
        raise TooFewRequestsError(f"Dynamism needs at least 2 dynamic requests, got {dynamic.size}")

    theta = length / dynamic.size
    deltas = [float(d) for d in np.diff(dynamic)]
    sigmas, sigma_bars = deviation_terms(deltas, theta)
    lambda_ = float(sum(sigmas))
    eta = float(sum(sigma_bars))
    rho = 1.0 if eta == 0 else min(1.0, max(0.0, 1.0 - lambda_ / eta))

    logger.debug(f"Dynamism over {dynamic.size} dynamic requests: lambda={lambda_:.4f}, eta={eta:.4f}, rho={rho:.4f}")
    return DynamismReport(
        theta=theta,
        deltas=deltas,
        sigmas=sigmas,
        lambda_=lambda_,
        sigma_bars=sigma_bars,
        eta=eta,
        rho=rho,
        dynamic_count=int(dynamic.size),
    )
