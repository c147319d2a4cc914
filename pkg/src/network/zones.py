"""
Zone membership and uniform sampling inside rectangle and circle zones.

Rectangles are measured in meters along the lon/lat axes of their center,
with length_lon / length_lat as full side lengths. Circles use great-circle
distance from the center.
"""

import math

from ..config.models import ResolvedPlace
from ..sampling.rng import RngStream
from .geodesy import Coordinate, CoordinateLike, apply_offset, destination_point, haversine, offset_meters

# Samples are drawn from a slightly shrunken shape so that floating-point
# round trips through degrees never land a point on the wrong side of the edge.
_SHRINK = 1.0 - 1e-9


def zone_contains(zone: ResolvedPlace, coord: CoordinateLike) -> bool:
    """True when the coordinate lies inside the zone (boundary included)."""
    center = Coordinate(zone.lon, zone.lat)
    spec = zone.spec
    if spec.is_rectangle:
        dx, dy = offset_meters(center, coord)
        return abs(dx) <= spec.length_lon / 2.0 and abs(dy) <= spec.length_lat / 2.0
    if spec.radius is not None:
        return haversine(center, coord) <= spec.radius
    raise ValueError(f"Place '{spec.name}' is not a zone")


def random_point_in_zone(zone: ResolvedPlace, rng: RngStream) -> Coordinate:
    """Uniformly distributed point inside a zone."""
    center = Coordinate(zone.lon, zone.lat)
    spec = zone.spec
    if spec.is_rectangle:
        dx = (rng.random() - 0.5) * spec.length_lon * _SHRINK
        dy = (rng.random() - 0.5) * spec.length_lat * _SHRINK
        return apply_offset(center, dx, dy)
    if spec.radius is not None:
        distance = spec.radius * math.sqrt(rng.random()) * _SHRINK
        bearing = rng.random() * 2.0 * math.pi
        return destination_point(center, distance, bearing)
    raise ValueError(f"Place '{spec.name}' is not a zone")
