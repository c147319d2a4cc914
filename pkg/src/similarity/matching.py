"""
Similarity between requests and between instances of the same size.

Two requests are alike when their origins and destinations are close in
travel time (phi) and, to a lesser degree, when they were announced (tau) and
want to leave (vartheta) around the same time. Instance similarity is the
mean request similarity over the best one-to-one pairing of their requests.
"""

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Any, Callable, Hashable, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..metrics.report import MetricRoles
from ..utils.exceptions import MissingRequestAttributeError, SizeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 600.0

Travel = Callable[[Hashable, Hashable], float]
Request = Mapping[str, Any]


@dataclass(frozen=True)
class SimilarityThresholds:
    """Thresholds (seconds) for the spatial, announcement and departure criteria."""

    th_tt: float = DEFAULT_THRESHOLD
    th_ts: float = DEFAULT_THRESHOLD
    th_e: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        for name in ("th_tt", "th_ts", "th_e"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass
class SimilarityResult:
    """
    Similarity of two instances.

    Attributes:
        xi_matrix: Request similarity of every (i, j) pair
        matching: Pairs (i, j) of the maximum-weight perfect matching
        omega: Mean similarity over the matched pairs
    """

    xi_matrix: np.ndarray
    matching: List[Tuple[int, int]] = field(default_factory=list)
    omega: float = 0.0


def _field(request: Request, name: str, index: object) -> Any:
    if name not in request:
        raise MissingRequestAttributeError(name, index)
    return request[name]


def similarity_level(phi_close: bool, tau_close: bool, vartheta_close: bool) -> float:
    """Score of a request pair from which criteria are under their thresholds."""
    if not phi_close:
        return 0.0
    if tau_close and vartheta_close:
        return 1.0
    if tau_close != vartheta_close:
        return 0.75
    return 0.5


def pair_similarity(
    r_i: Request,
    r_j: Request,
    th: SimilarityThresholds,
    travel: Travel,
    roles: MetricRoles = MetricRoles(),
) -> float:
    """
    Similarity of two requests: 1.0, 0.75, 0.5 or 0.0.

    Raises:
        MissingRequestAttributeError: A request lacks origin, destination,
            time stamp or earliest departure
    """
    o_i, o_j = _field(r_i, roles.origin, "i"), _field(r_j, roles.origin, "j")
    d_i, d_j = _field(r_i, roles.destination, "i"), _field(r_j, roles.destination, "j")
    phi = travel(o_i, o_j) + travel(d_i, d_j)
    tau = abs(float(_field(r_i, roles.time_stamp, "i")) - float(_field(r_j, roles.time_stamp, "j")))
    vartheta = abs(
        float(_field(r_i, roles.earliest_departure, "i")) - float(_field(r_j, roles.earliest_departure, "j"))
    )
    return similarity_level(phi < th.th_tt, tau < th.th_ts, vartheta < th.th_e)


def similarity_matrix(
    first: Sequence[Request],
    second: Sequence[Request],
    th: SimilarityThresholds,
    travel: Travel,
    roles: MetricRoles = MetricRoles(),
) -> np.ndarray:
    matrix = np.zeros((len(first), len(second)))
    for i, r_i in enumerate(first):
        for j, r_j in enumerate(second):
            matrix[i, j] = pair_similarity(r_i, r_j, th, travel, roles)
    return matrix


def instance_similarity(
    first: Sequence[Request],
    second: Sequence[Request],
    th: SimilarityThresholds,
    travel: Travel,
    roles: MetricRoles = MetricRoles(),
) -> SimilarityResult:
    """
    Similarity of two instances of the same size.

    Builds the request similarity of every cross pair and solves the
    assignment problem for the pairing of maximum total similarity.

    Raises:
        SizeMismatchError: The instances have different numbers of requests
    """
    if len(first) != len(second):
        raise SizeMismatchError(len(first), len(second))
    if not first:
        return SimilarityResult(xi_matrix=np.zeros((0, 0)), matching=[], omega=1.0)

    matrix = similarity_matrix(first, second, th, travel, roles)
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    matching = [(int(i), int(j)) for i, j in zip(rows, cols)]
    omega = float(matrix[rows, cols].sum() / len(matching))
    logger.debug(f"Instance similarity of {len(first)} requests: omega={omega:.4f}")
    return SimilarityResult(xi_matrix=matrix, matching=matching, omega=omega)


def brute_force_assignment(weights: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    """Best total weight and permutation by trying every permutation (small square matrices only)."""
    weights = np.asarray(weights, dtype=float)
    size = weights.shape[0]
    best_total, best_perm = -np.inf, tuple(range(size))
    for perm in permutations(range(size)):
        total = float(weights[np.arange(size), list(perm)].sum()) if size else 0.0
        if total > best_total:
            best_total, best_perm = total, perm
    return best_total, best_perm


def diversity_filter(
    instances: Sequence[Sequence[Request]],
    th: SimilarityThresholds,
    travel: Travel,
    omega_max: float,
    roles: MetricRoles = MetricRoles(),
) -> List[int]:
    """
    Indices of a subset of instances that are pairwise distinct enough.

    Instances are taken greedily in input order; one is kept when its
    similarity to every instance already kept is at most omega_max.
    """
    kept: List[int] = []
    for index, candidate in enumerate(instances):
        if all(
            instance_similarity(instances[k], candidate, th, travel, roles).omega <= omega_max for k in kept
        ):
            kept.append(index)
        else:
            logger.info(f"Instance {index} dropped: too similar to a kept instance")
    return kept
