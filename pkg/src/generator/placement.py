"""
Placing request locations on the network.

Locations are network nodes. Without further instructions a location is a
uniformly chosen node; zones are sampled uniformly and snapped to the
nearest node; the POI method places an origin/destination pair a drawn trip
distance apart, starting from a POI-weighted grid cell.
"""

import logging
import math
from typing import Tuple

from ..config.models import MobilityMethodSpec, ResolvedPlace
from ..expr.values import Location
from ..network.geodesy import destination_point
from ..network.graph import RoadNetwork
from ..network.pois import PoiIndex
from ..network.zones import random_point_in_zone
from ..sampling.distributions import sample_pdf, weighted_index
from ..sampling.rng import RngStream
from ..utils.exceptions import DegeneratePoiIndexError, PlacementFailureError

logger = logging.getLogger(__name__)

MAX_BEARING_REDRAWS = 20
MAX_PLACEMENT_REDRAWS = 200


def random_location(net: RoadNetwork, rng: RngStream) -> Location:
    """Uniformly chosen network node."""
    node = int(net.node_ids[rng.integers(len(net.node_ids))])
    return net.location(node)


def location_in_zone(zone: ResolvedPlace, net: RoadNetwork, rng: RngStream) -> Location:
    """Node nearest to a uniformly drawn point of the zone."""
    point = random_point_in_zone(zone, rng)
    return net.location(net.nearest_node(point))


def snap(net: RoadNetwork, lon: float, lat: float) -> Location:
    return net.location(net.nearest_node((lon, lat)))


def apply_poi_method(
    spec: MobilityMethodSpec, poi: PoiIndex, net: RoadNetwork, rng: RngStream
) -> Tuple[Location, Location]:
    """
    Place a location pair with the POI mobility method.

    A grid cell is chosen with probability proportional to its POI count and
    the first location is drawn uniformly inside it. The second lies at a
    distance drawn from spec.pdf (negative draws count as 0) in a uniform
    bearing; bearings leading out of the network bounds are redrawn, and the
    distance too after MAX_BEARING_REDRAWS failed bearings. A fair coin
    decides which of the two is returned first.

    Args:
        spec: Attribute pair and trip-distance pdf (meters)
        poi: POI grid over the network
        net: Drive network
        rng: Stream to draw from

    Returns:
        (location for spec.locations[0], location for spec.locations[1])

    Raises:
        DegeneratePoiIndexError: The grid holds no POIs
        PlacementFailureError: No in-bounds second location after MAX_PLACEMENT_REDRAWS redraws
    """
    if poi is None or poi.total == 0:
        raise DegeneratePoiIndexError("The POI method needs a POI grid with at least one POI")

    cell = weighted_index(poi.number_of_cells, poi.weights(), rng)
    first = random_point_in_zone(poi.zone(cell), rng)

    distance = max(0.0, sample_pdf(spec.pdf, rng))
    bearing_failures = 0
    for _ in range(MAX_PLACEMENT_REDRAWS + 1):
        bearing = rng.random() * 2.0 * math.pi
        second = destination_point(first, distance, bearing)
        if net.contains(second):
            break
        bearing_failures += 1
        if bearing_failures >= MAX_BEARING_REDRAWS:
            distance = max(0.0, sample_pdf(spec.pdf, rng))
            bearing_failures = 0
    else:
        raise PlacementFailureError(
            f"No location pair for {spec.locations[0]}/{spec.locations[1]} inside the network "
            f"after {MAX_PLACEMENT_REDRAWS} redraws"
        )

    pair = (snap(net, *first), snap(net, *second))
    if rng.random() < 0.5:
        pair = (pair[1], pair[0])
    return pair
