"""
Network services for expression evaluation during generation.
"""

import logging
import threading
from typing import Dict, Hashable, Optional, Tuple

from ..expr.evaluator import EvaluationContext
from ..expr.values import Location
from ..network.bundle import NetworkBundle
from ..network.routing import compute_arc_travel_times, shortest_travel_time
from ..network.stations import stations_within_walk
from ..utils.exceptions import ExpressionError, UnknownNodeError

logger = logging.getLogger(__name__)


def prepare_network(bundle: NetworkBundle, speed_factor: float, equal_speed: Optional[float] = None) -> None:
    """Annotate the drive network's arcs unless they already carry these travel times."""
    drive = bundle.drive
    if drive.speed_factor == speed_factor and drive.graph.graph.get("equal_speed") == equal_speed:
        return
    compute_arc_travel_times(drive, speed_factor, equal_speed)
    drive.graph.graph["equal_speed"] = equal_speed


class NetworkContext(EvaluationContext):
    """
    Evaluation context backed by a network bundle.

    dtt() runs on the drive network; its shortest-path trees are memoized by
    the network per source node. stops() answers are memoized per
    (node, max walking time, walking speed); replicas on worker threads share
    both memos.
    """

    def __init__(self, bundle: NetworkBundle):
        self.bundle = bundle
        self._stops: Dict[Tuple[int, float, float], frozenset] = {}
        self._lock = threading.Lock()

    def travel_time(self, a: Location, b: Location) -> float:
        return shortest_travel_time(self.bundle.drive, a.node, b.node)

    def stations_near(self, a: Location, max_walk: float, walk_speed: float) -> frozenset:
        if self.bundle.stations is None:
            raise ExpressionError("stops() needs a station set; add stations to the network bundle")
        key = (a.node, max_walk, walk_speed)
        with self._lock:
            found = self._stops.get(key)
        if found is None:
            found = stations_within_walk(self.bundle.stations, self.bundle.walk, (a.lon, a.lat), max_walk, walk_speed)
            with self._lock:
                found = self._stops.setdefault(key, found)
        return found

    def node_of(self, item: Hashable) -> int:
        """Drive node of a location or of a station id."""
        if isinstance(item, Location):
            return item.node
        stations = self.bundle.stations
        if stations is not None and item in stations:
            node = stations[item].drive_node
            if node is None:
                node = self.bundle.drive.nearest_node(stations[item].coordinate)
            return node
        raise UnknownNodeError(item)

    def travel(self, a: Hashable, b: Hashable) -> float:
        """Travel time between two locations or stations, in seconds."""
        return shortest_travel_time(self.bundle.drive, self.node_of(a), self.node_of(b))
