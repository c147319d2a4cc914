"""
Spherical geodesy helpers.

Distances use a sphere of radius 6,371 km. Scalar operations go through
geopy's great-circle model; the vectorised distance used for nearest-node
search is the same formula over numpy arrays.
"""

import math
from typing import NamedTuple, Tuple, Union

import numpy as np
from geopy.distance import great_circle
from geopy.point import Point

EARTH_RADIUS_M = 6_371_000.0
EARTH_RADIUS_KM = EARTH_RADIUS_M / 1000.0


class Coordinate(NamedTuple):
    """Geographic coordinate in degrees."""

    lon: float
    lat: float

    def is_valid(self) -> bool:
        return -180.0 <= self.lon <= 180.0 and -90.0 <= self.lat <= 90.0


CoordinateLike = Union[Coordinate, Tuple[float, float]]


def _as_coordinate(value: CoordinateLike) -> Coordinate:
    return value if isinstance(value, Coordinate) else Coordinate(float(value[0]), float(value[1]))


def haversine(a: CoordinateLike, b: CoordinateLike) -> float:
    """
    Great-circle distance between two coordinates.

    Args:
        a: First coordinate (lon, lat)
        b: Second coordinate (lon, lat)

    Returns:
        Distance in meters
    """
    a, b = _as_coordinate(a), _as_coordinate(b)
    if a == b:
        return 0.0
    return great_circle((a.lat, a.lon), (b.lat, b.lon), radius=EARTH_RADIUS_KM).meters


def haversine_many(origin: CoordinateLike, lons: np.ndarray, lats: np.ndarray) -> np.ndarray:
    """Vectorised great-circle distance (meters) from one coordinate to many."""
    origin = _as_coordinate(origin)
    lon1, lat1 = math.radians(origin.lon), math.radians(origin.lat)
    lon2, lat2 = np.radians(lons), np.radians(lats)
    dlon = lon2 - lon1
    dlat = lat2 - lat1
    h = np.sin(dlat / 2.0) ** 2 + math.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def destination_point(origin: CoordinateLike, distance: float, bearing: float) -> Coordinate:
    """
    Point reached by travelling a distance along a great circle.

    Args:
        origin: Start coordinate (lon, lat)
        distance: Distance in meters (>= 0)
        bearing: Initial bearing in radians, clockwise from north

    Returns:
        Destination coordinate with longitude normalised to [-180, 180]
    """
    origin = _as_coordinate(origin)
    if distance <= 0:
        return origin
    point = great_circle(radius=EARTH_RADIUS_KM).destination(
        Point(origin.lat, origin.lon), bearing=math.degrees(bearing), distance=distance / 1000.0
    )
    lon = (point.longitude + 540.0) % 360.0 - 180.0
    return Coordinate(lon, point.latitude)


def offset_meters(center: CoordinateLike, point: CoordinateLike) -> Tuple[float, float]:
    """
    East/north offset of a point from a center, in meters.

    Uses the local equirectangular projection at the center latitude, which
    is how rectangle zones are measured along their lon/lat axes.
    """
    center, point = _as_coordinate(center), _as_coordinate(point)
    dx = math.radians(point.lon - center.lon) * EARTH_RADIUS_M * math.cos(math.radians(center.lat))
    dy = math.radians(point.lat - center.lat) * EARTH_RADIUS_M
    return dx, dy


def apply_offset(center: CoordinateLike, dx: float, dy: float) -> Coordinate:
    """Inverse of offset_meters."""
    center = _as_coordinate(center)
    lat = center.lat + math.degrees(dy / EARTH_RADIUS_M)
    lon = center.lon + math.degrees(dx / (EARTH_RADIUS_M * math.cos(math.radians(center.lat))))
    return Coordinate(lon, lat)
