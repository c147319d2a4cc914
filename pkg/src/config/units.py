"""
Unit conversion for configuration values.

All internal operations are done in meters, seconds, and meters per second;
every dimensioned value read from a configuration file goes through
canonicalize_units once, at parse time.
"""

from typing import Dict

from ..utils.exceptions import UnknownUnitError

TIME_UNITS: Dict[str, float] = {"s": 1.0, "min": 60.0, "h": 3600.0}
LENGTH_UNITS: Dict[str, float] = {"m": 1.0, "km": 1000.0, "mi": 1609.344}
SPEED_UNITS: Dict[str, float] = {"mps": 1.0, "kmh": 1.0 / 3.6, "miph": 0.44704}

UNITS_BY_DIMENSION: Dict[str, Dict[str, float]] = {
    "time": TIME_UNITS,
    "length": LENGTH_UNITS,
    "speed": SPEED_UNITS,
}

CANONICAL_UNIT = {"time": "s", "length": "m", "speed": "mps"}

# Sub-item carrying the unit tag for each dimension
UNIT_KEYS = {"time": "time_unit", "length": "length_unit", "speed": "speed_unit"}


def canonicalize_units(value: float, dimension: str, unit: str) -> float:
    """
    Convert a value to seconds, meters or meters per second.

    Args:
        value: Value expressed in `unit`
        dimension: One of 'time', 'length', 'speed'
        unit: Unit tag legal for the dimension (s/min/h, m/km/mi, mps/kmh/miph)

    Returns:
        The value in canonical units

    Raises:
        UnknownUnitError: If the tag is not defined for the dimension
    """
    table = UNITS_BY_DIMENSION.get(dimension)
    if table is None:
        raise UnknownUnitError(unit, dimension)
    factor = table.get(unit)
    if factor is None:
        raise UnknownUnitError(unit, dimension)
    if dimension == "speed" and unit == "kmh":
        # exact division keeps 1 kmh == 1000/3600
        return value / 3.6
    return value * factor


def dimension_of_unit(unit: str) -> str:
    """Return the dimension a unit tag belongs to."""
    for dimension, table in UNITS_BY_DIMENSION.items():
        if unit in table:
            return dimension
    raise UnknownUnitError(unit, "time/length/speed")
