"""
Runtime values of the expression language.

Values are plain Python objects: int, float, bool, str, Location, tuple
(array of primitives) and frozenset (set of primitives).
"""

import math
from dataclasses import dataclass
from typing import Any, Union

from ..utils.exceptions import ExpressionTypeError


@dataclass(frozen=True)
class Location:
    """A point snapped to a network node."""

    node: int
    lon: float
    lat: float

    def __str__(self) -> str:
        return f"node {self.node} ({self.lon:.6f}, {self.lat:.6f})"


Value = Union[int, float, bool, str, Location, tuple, frozenset]


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from negative infinity (2.5 -> 3, -2.5 -> -2)."""
    return int(math.floor(value + 0.5))


def coerce_to_type(value: Any, type_name: str, name: str = "value") -> Value:
    """
    Convert a computed value to the declared attribute type.

    Integer attributes round half-up; arrays are stored as sorted tuples so
    that the written files do not depend on set iteration order.
    """
    if type_name == "integer":
        if isinstance(value, bool) or not is_number(value):
            raise ExpressionTypeError(f"{name}: expected a number for an integer attribute, got {value!r}")
        return value if isinstance(value, int) else round_half_up(value)
    if type_name == "real":
        if not is_number(value):
            raise ExpressionTypeError(f"{name}: expected a number for a real attribute, got {value!r}")
        return float(value)
    if type_name == "string":
        return value if isinstance(value, str) else str(value)
    if type_name == "location":
        if not isinstance(value, Location):
            raise ExpressionTypeError(f"{name}: expected a location, got {value!r}")
        return value
    if type_name == "array_primitives":
        if isinstance(value, frozenset):
            return tuple(sorted(value, key=_sort_key))
        if isinstance(value, (tuple, list)):
            return tuple(value)
        return (value,)
    raise ExpressionTypeError(f"{name}: unknown attribute type '{type_name}'")


def _sort_key(item: Any):
    return (type(item).__name__, item)
