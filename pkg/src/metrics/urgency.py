"""
Urgency of an instance: how long the system has to react to each request.

The reaction time of a request is its latest departure minus its time stamp;
urgency is the population mean and standard deviation of the reaction times
of the dynamic requests.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..utils.exceptions import EmptyInstanceError, NegativeReactionTimeError

logger = logging.getLogger(__name__)


@dataclass
class UrgencyReport:
    values: List[float] = field(default_factory=list)
    mean: float = 0.0
    std: float = 0.0


def urgency(
    timestamps: Sequence[float],
    latest_departures: Sequence[float],
    period_start: Optional[float] = None,
) -> UrgencyReport:
    """
    Reaction-time statistics of the dynamic requests.

    Args:
        timestamps: Announcement time of every request
        latest_departures: Latest departure of every request, same order
        period_start: Start of the planning period; requests announced at or
            before it are static and ignored. None keeps every request.

    Returns:
        UrgencyReport with the per-request reaction times, their mean and
        population standard deviation

    Raises:
        NegativeReactionTimeError: A dynamic request departs before it is announced
        EmptyInstanceError: No dynamic request to measure
    """
    ts = np.asarray(timestamps, dtype=float)
    lu = np.asarray(latest_departures, dtype=float)
    if ts.shape != lu.shape:
        raise ValueError(f"{ts.size} time stamps for {lu.size} latest departures")

    if period_start is not None:
        keep = ts > period_start
        ts, lu = ts[keep], lu[keep]
    if ts.size == 0:
        raise EmptyInstanceError("Urgency needs at least one dynamic request")

    reaction = lu - ts
    negative = np.flatnonzero(reaction < 0)
    if negative.size:
        first = int(negative[0])
        raise NegativeReactionTimeError(
            f"Latest departure {lu[first]} precedes time stamp {ts[first]} ({negative.size} requests affected)"
        )

    report = UrgencyReport(
        values=[float(v) for v in reaction],
        mean=float(reaction.mean()),
        std=float(reaction.std(ddof=0)),
    )
    logger.debug(f"Urgency over {ts.size} requests: mean={report.mean:.2f}, std={report.std:.2f}")
    return report
