"""
Benchmark sets: one configuration template expanded over a grid of
instance properties.

Every combination of size, dynamism level, urgency (mean, std) and
geographic-dispersion class becomes an instance group named
N_p_s_b_e_d_m_t_g (network, problem, size, planning period begin and end,
dynamism in percent, urgency mean and std, dispersion class). Urgency is set
through the `reaction_time` attribute, whose value separates the time stamp
from the latest departure; dispersion through interval constraints on
`direct_travel_time`. Groups keep the template's seed, so they share request
locations wherever only the property values differ.
"""

import copy
import itertools
import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..config.models import MAX_PLANNING_PERIOD, MIN_PLANNING_PERIOD, TIME_STAMP
from ..utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

REACTION_TIME = "reaction_time"
DIRECT_TRAVEL_TIME = "direct_travel_time"

# Direct travel time bounds (s): (lower, lower inclusive, upper)
DISPERSION_CLASSES: Dict[str, Optional[Tuple[float, bool, float]]] = {
    "short": (180.0, True, 1000.0),
    "medium": (1000.0, False, 3000.0),
    "long": (3000.0, False, 6000.0),
    "unbounded": None,
}

_NUMERIC_BOUND = re.compile(r"^\s*(?P<name>\w+)\s*(<=|>=|<|>)\s*-?\d+(\.\d*)?\s*$")


@dataclass(frozen=True)
class BenchmarkGroup:
    """One cell of the benchmark grid and the configuration generating it."""

    name: str
    size: int
    dynamism: Optional[float]
    urgency: Optional[Tuple[float, float]]
    dispersion: Optional[str]
    config: Dict[str, Any]


def _attribute(raw: Dict[str, Any], name: str) -> Dict[str, Any]:
    for attribute in raw.get("attributes", []):
        if isinstance(attribute, dict) and attribute.get("name") == name:
            return attribute
    raise ConfigError(f"benchmark template declares no attribute '{name}'")


def _parameter_value(raw: Dict[str, Any], name: str) -> Any:
    for parameter in raw.get("parameters", []):
        if isinstance(parameter, dict) and parameter.get("name") == name:
            return parameter.get("value")
    return None


def dispersion_constraints(name: str, dispersion: str) -> List[str]:
    """Constraints bounding an attribute to a dispersion class's interval."""
    if dispersion not in DISPERSION_CLASSES:
        raise ConfigError(f"unknown dispersion class '{dispersion}', expected one of {', '.join(DISPERSION_CLASSES)}")
    bounds = DISPERSION_CLASSES[dispersion]
    if bounds is None:
        return []
    lower, inclusive, upper = bounds
    return [f"{name} {'>=' if inclusive else '>'} {lower:g}", f"{name} <= {upper:g}"]


def _set_dispersion(attribute: Dict[str, Any], dispersion: str) -> None:
    # numeric bounds of the template are replaced, other constraints stay
    kept = [
        text
        for text in attribute.get("constraints", [])
        if not ((m := _NUMERIC_BOUND.match(text)) and m.group("name") == attribute["name"])
    ]
    attribute["constraints"] = kept + dispersion_constraints(attribute["name"], dispersion)


def _number(value: float) -> str:
    return f"{value:g}"


def group_name(
    raw: Dict[str, Any],
    size: int,
    dynamism: Optional[float],
    urgency: Optional[Tuple[float, float]],
    dispersion: Optional[str],
) -> str:
    """Group identifier N_p_s_b_e_d_m_t_g; unset properties show as 'x'."""
    begin = _parameter_value(raw, MIN_PLANNING_PERIOD)
    end = _parameter_value(raw, MAX_PLANNING_PERIOD)
    parts = [
        "".join(str(raw.get("network", "network")).split()),
        str(raw.get("problem", "")) or "x",
        str(size),
        _number(begin) if begin is not None else "x",
        _number(end) if end is not None else "x",
        _number(round(dynamism * 100, 6)) if dynamism is not None else "x",
        _number(urgency[0]) if urgency is not None else "x",
        _number(urgency[1]) if urgency is not None else "x",
        dispersion or "x",
    ]
    return "_".join(parts)


def expand_benchmark(
    template: Dict[str, Any],
    sizes: Optional[Sequence[int]] = None,
    dynamism: Optional[Sequence[float]] = None,
    urgency: Optional[Sequence[Tuple[float, float]]] = None,
    dispersion: Optional[Sequence[str]] = None,
    time_stamp: str = TIME_STAMP,
) -> List[BenchmarkGroup]:
    """
    Expand a configuration template over the cartesian product of property levels.

    An axis left as None keeps the template's setting; an empty axis empties
    the whole product.

    Args:
        template: Raw configuration (parsed JSON) used as the starting point
        sizes: Numbers of requests
        dynamism: Dynamism targets, fractions in [0, 1]
        urgency: (mean, std) of the reaction time, in seconds
        dispersion: Dispersion classes (short, medium, long, unbounded)
        time_stamp: Name of the announcement-time attribute

    Returns:
        One BenchmarkGroup per grid cell, in product order

    Raises:
        ConfigError: The template lacks an attribute an axis needs, or a level is out of range
    """
    size_axis: Sequence[Optional[int]] = sizes if sizes is not None else [None]
    dynamism_axis: Sequence[Optional[float]] = dynamism if dynamism is not None else [None]
    urgency_axis: Sequence[Optional[Tuple[float, float]]] = urgency if urgency is not None else [None]
    dispersion_axis: Sequence[Optional[str]] = dispersion if dispersion is not None else [None]

    if dynamism:
        _attribute(template, time_stamp)
        for level in dynamism:
            if not 0.0 <= level <= 1.0:
                raise ConfigError(f"dynamism level must be in [0, 1], got {level}")
    if urgency:
        _attribute(template, REACTION_TIME)
        for mean, std in urgency:
            if std < 0:
                raise ConfigError(f"urgency standard deviation must be >= 0, got {std}")
    if dispersion:
        _attribute(template, DIRECT_TRAVEL_TIME)
        for level in dispersion:
            dispersion_constraints(DIRECT_TRAVEL_TIME, level)

    groups = []
    for size, rho, urgency_level, gd in itertools.product(size_axis, dynamism_axis, urgency_axis, dispersion_axis):
        raw = copy.deepcopy(template)
        if size is not None:
            raw["requests"] = int(size)
        if rho is not None:
            attribute = _attribute(raw, time_stamp)
            # targeted stamps replace a computed time stamp
            attribute.pop("expression", None)
            attribute["dynamism"] = rho
        if urgency_level is not None:
            attribute = _attribute(raw, REACTION_TIME)
            for key in ("expression", "subset_primitives"):
                attribute.pop(key, None)
            attribute["time_unit"] = "s"
            attribute["pdf"] = {"type": "normal", "loc": urgency_level[0], "scale": urgency_level[1]}
        if gd is not None:
            _set_dispersion(_attribute(raw, DIRECT_TRAVEL_TIME), gd)

        name = group_name(raw, int(raw.get("requests", 0)), rho, urgency_level, gd)
        groups.append(BenchmarkGroup(name, int(raw.get("requests", 0)), rho, urgency_level, gd, raw))

    logger.info(f"Benchmark grid expanded to {len(groups)} instance groups")
    return groups
