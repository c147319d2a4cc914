"""
Geographic dispersion of an instance.

gd = mu + omega, where mu is the mean direct travel time of the requests and
omega estimates detours: for each request endpoint, the mean travel time to
its n nearest endpoints of other requests whose time windows lie within th_s
of it.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Collection, Hashable, List, Optional, Sequence

import numpy as np

from ..utils.exceptions import EmptyInstanceError, MetricsError

logger = logging.getLogger(__name__)

DEFAULT_TIME_THRESHOLD = 600.0
DEFAULT_NEIGHBORS = 2

ORIGIN = "origin"
DESTINATION = "destination"

TravelFunction = Callable[[Hashable, Hashable], float]


@dataclass(frozen=True)
class DispersionRequest:
    """
    The parts of a request geographic dispersion looks at.

    `direct_time` overrides travel(origin, destination); the ODBRP variant
    sets it to the mean travel time between the request's stations.
    """

    origin: Hashable
    destination: Hashable
    earliest_departure: float
    latest_arrival: float
    direct_time: Optional[float] = None


@dataclass(frozen=True)
class Neighbor:
    request: int
    endpoint: str
    location: Hashable
    travel_time: float


@dataclass
class DispersionReport:
    mu: float
    omega: float
    gd: float
    th_s: float
    n: int
    origin_neighbors: List[List[Neighbor]] = field(default_factory=list)
    destination_neighbors: List[List[Neighbor]] = field(default_factory=list)
    tn_origin: List[float] = field(default_factory=list)
    tn_destination: List[float] = field(default_factory=list)


def station_direct_time(
    origin_stations: Collection[Hashable], destination_stations: Collection[Hashable], travel: TravelFunction
) -> float:
    """
    Mean travel time over every (origin station, destination station) pair.

    Raises:
        MetricsError: Either station set is empty
    """
    if not origin_stations or not destination_stations:
        raise MetricsError("A request with no stations near its origin or destination has no direct travel time")
    times = [travel(a, b) for a, b in product(sorted(origin_stations), sorted(destination_stations))]
    return float(np.mean(times))


def candidate_locations(requests: Sequence[DispersionRequest], i: int, endpoint: str, th_s: float) -> List[tuple]:
    """
    Endpoints of other requests that may be served right after endpoint `endpoint` of request i.

    Returns (request index, endpoint, location) triples in declaration order,
    the origin of a request before its destination.
    """
    anchor = requests[i].earliest_departure if endpoint == ORIGIN else requests[i].latest_arrival
    found = []
    for j, other in enumerate(requests):
        if j == i:
            continue
        if abs(anchor - other.earliest_departure) < th_s:
            found.append((j, ORIGIN, other.origin))
        if abs(anchor - other.latest_arrival) < th_s:
            found.append((j, DESTINATION, other.destination))
    return found


def nearest_neighbors(source: Hashable, candidates: List[tuple], travel: TravelFunction, n: int) -> List[Neighbor]:
    """Up to n candidates closest to `source`; ties keep candidate order."""
    if n <= 0:
        return []
    scored = [
        Neighbor(request=j, endpoint=endpoint, location=location, travel_time=float(travel(source, location)))
        for j, endpoint, location in candidates
    ]
    # sorted() is stable, so equal travel times keep declaration order
    return sorted(scored, key=lambda nb: nb.travel_time)[:n]


def _mean_time(neighbors: List[Neighbor]) -> float:
    if not neighbors:
        return 0.0
    return float(np.mean([nb.travel_time for nb in neighbors]))


def geographic_dispersion(
    requests: Sequence[DispersionRequest],
    travel: TravelFunction,
    th_s: float = DEFAULT_TIME_THRESHOLD,
    n: int = DEFAULT_NEIGHBORS,
) -> DispersionReport:
    """
    Measure the geographic dispersion of an instance.

    Args:
        requests: Requests of the instance in declaration order
        travel: Travel time in seconds between two locations
        th_s: Time threshold under which two time windows may coincide
        n: Number of nearest neighbours averaged per endpoint

    Returns:
        DispersionReport with mu, omega, gd and the neighbour sets

    Raises:
        EmptyInstanceError: No requests
    """
    if not requests:
        raise EmptyInstanceError("Geographic dispersion needs at least one request")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")

    direct = [
        r.direct_time if r.direct_time is not None else float(travel(r.origin, r.destination)) for r in requests
    ]
    mu = float(np.mean(direct))

    report = DispersionReport(mu=mu, omega=0.0, gd=mu, th_s=th_s, n=n)
    for i, request in enumerate(requests):
        near_origin = nearest_neighbors(request.origin, candidate_locations(requests, i, ORIGIN, th_s), travel, n)
        near_destination = nearest_neighbors(
            request.destination, candidate_locations(requests, i, DESTINATION, th_s), travel, n
        )
        report.origin_neighbors.append(near_origin)
        report.destination_neighbors.append(near_destination)
        report.tn_origin.append(_mean_time(near_origin))
        report.tn_destination.append(_mean_time(near_destination))

    report.omega = (sum(report.tn_origin) + sum(report.tn_destination)) / (2 * len(requests))
    report.gd = report.mu + report.omega
    logger.debug(f"Geographic dispersion of {len(requests)} requests: mu={mu:.2f}, omega={report.omega:.2f}")
    return report
