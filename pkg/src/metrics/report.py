"""
Instance measurement and report formatting.

measure_instance reads requests as attribute dictionaries (the generator's
records, or rows read back from an instance CSV) and computes size,
dynamism, urgency and geographic dispersion. Roles map the symbols the
measures use to attribute names; the defaults are the attribute names of
the reference configurations.
"""

import logging
import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from ..utils.exceptions import EmptyInstanceError, MissingRequestAttributeError, TooFewRequestsError
from .dispersion import (
    DEFAULT_NEIGHBORS,
    DEFAULT_TIME_THRESHOLD,
    DispersionReport,
    DispersionRequest,
    geographic_dispersion,
    station_direct_time,
)
from .dynamism import DynamismReport, dynamism
from .urgency import UrgencyReport, urgency

logger = logging.getLogger(__name__)

REPORT_KEYS = ("requests", "theta", "lambda", "eta", "rho", "urgency_mean", "urgency_std", "mu", "omega", "gd")


@dataclass(frozen=True)
class MetricRoles:
    """Attribute names carrying the per-request symbols the measures read."""

    time_stamp: str = "time_stamp"
    earliest_departure: str = "earliest_departure"
    latest_departure: str = "latest_departure"
    latest_arrival: str = "latest_arrival"
    origin: str = "origin"
    destination: str = "destination"
    stops_origin: str = "stops_orgn"
    stops_destination: str = "stops_dest"


@dataclass
class InstanceMetrics:
    """Measures of one instance; a measure is None when the instance lacks its attributes."""

    requests: int
    period: Optional[Tuple[float, float]] = None
    dynamism: Optional[DynamismReport] = None
    urgency: Optional[UrgencyReport] = None
    dispersion: Optional[DispersionReport] = None


def truncate_2dp(value: float) -> str:
    """Two-decimal display that truncates toward zero: 6.125 shows as 6.12."""
    if not math.isfinite(value):
        return str(value)
    return str(Decimal(repr(float(value))).quantize(Decimal("0.01"), rounding=ROUND_DOWN))


def _column(records: Sequence[Mapping[str, Any]], name: str) -> List[Any]:
    values = []
    for index, record in enumerate(records):
        if name not in record:
            raise MissingRequestAttributeError(name, index)
        values.append(record[name])
    return values


def _has(records: Sequence[Mapping[str, Any]], *names: str) -> bool:
    return all(name in records[0] for name in names)


def measure_instance(
    records: Sequence[Mapping[str, Any]],
    travel: Callable[[Hashable, Hashable], float],
    period: Optional[Tuple[float, float]] = None,
    roles: MetricRoles = MetricRoles(),
    th_s: float = DEFAULT_TIME_THRESHOLD,
    n: int = DEFAULT_NEIGHBORS,
) -> InstanceMetrics:
    """
    Compute every measure the instance's attributes allow.

    Args:
        records: Requests as attribute-name -> value mappings
        travel: Travel time between two locations (or two stations)
        period: Planning period; defaults to the span of the time stamps, in
            which case every request counts as dynamic
        roles: Attribute names of the per-request symbols
        th_s: Time-window proximity threshold for geographic dispersion
        n: Nearest neighbours per endpoint for geographic dispersion

    Returns:
        InstanceMetrics

    Raises:
        EmptyInstanceError: No requests
        MissingRequestAttributeError: A record lacks an attribute other records have
    """
    if not records:
        raise EmptyInstanceError("The instance has no requests")

    metrics = InstanceMetrics(requests=len(records), period=period)

    if _has(records, roles.time_stamp):
        timestamps = sorted(float(v) for v in _column(records, roles.time_stamp))
        # An inferred period starts at the first request, which is still dynamic.
        inferred = metrics.period is None
        if inferred:
            metrics.period = (timestamps[0], timestamps[-1])
        try:
            metrics.dynamism = dynamism(timestamps, metrics.period, all_dynamic=inferred)
        except TooFewRequestsError as e:
            logger.warning(f"Dynamism not measured: {e}")

        if _has(records, roles.latest_departure):
            ts = [float(v) for v in _column(records, roles.time_stamp)]
            lu = [float(v) for v in _column(records, roles.latest_departure)]
            try:
                metrics.urgency = urgency(ts, lu, period_start=None if inferred else metrics.period[0])
            except EmptyInstanceError as e:
                logger.warning(f"Urgency not measured: {e}")
    else:
        logger.info(f"No '{roles.time_stamp}' attribute; dynamism and urgency skipped")

    if _has(records, roles.origin, roles.destination, roles.earliest_departure, roles.latest_arrival):
        with_stations = _has(records, roles.stops_origin, roles.stops_destination)
        requests = []
        for record in records:
            direct = None
            if with_stations:
                direct = station_direct_time(record[roles.stops_origin], record[roles.stops_destination], travel)
            requests.append(
                DispersionRequest(
                    origin=record[roles.origin],
                    destination=record[roles.destination],
                    earliest_departure=float(record[roles.earliest_departure]),
                    latest_arrival=float(record[roles.latest_arrival]),
                    direct_time=direct,
                )
            )
        metrics.dispersion = geographic_dispersion(requests, travel, th_s=th_s, n=n)
    else:
        logger.info("Origin, destination or time-window attributes missing; geographic dispersion skipped")

    return metrics


def report_values(metrics: InstanceMetrics) -> Dict[str, Optional[float]]:
    """Flat key/value view of the measures, full precision, None when not measured."""
    values: Dict[str, Optional[float]] = dict.fromkeys(REPORT_KEYS)
    values["requests"] = metrics.requests
    if metrics.dynamism is not None:
        values.update(
            theta=metrics.dynamism.theta,
            eta=metrics.dynamism.eta,
            rho=metrics.dynamism.rho,
        )
        values["lambda"] = metrics.dynamism.lambda_
    if metrics.urgency is not None:
        values.update(urgency_mean=metrics.urgency.mean, urgency_std=metrics.urgency.std)
    if metrics.dispersion is not None:
        values.update(mu=metrics.dispersion.mu, omega=metrics.dispersion.omega, gd=metrics.dispersion.gd)
    return values


def report_to_frame(metrics: InstanceMetrics) -> pd.DataFrame:
    """Two-column (key, value) table of the measures, unmeasured keys omitted."""
    rows = [(key, value) for key, value in report_values(metrics).items() if value is not None]
    return pd.DataFrame(rows, columns=["key", "value"])


def format_report(metrics: InstanceMetrics) -> str:
    """Human-readable report with values truncated to two decimals."""
    lines = [f"requests: {metrics.requests}"]
    if metrics.period is not None:
        lines.append(f"planning period: [{truncate_2dp(metrics.period[0])}, {truncate_2dp(metrics.period[1])}]")
    for key, value in report_values(metrics).items():
        if key == "requests":
            continue
        lines.append(f"{key}: {'-' if value is None else truncate_2dp(value)}")
    return "\n".join(lines)
