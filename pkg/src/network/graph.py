"""
Road network model.

A RoadNetwork wraps a networkx MultiDiGraph using the OSMnx attribute names:
nodes carry `x` (lon) and `y` (lat), arcs carry `length` (m), `maxspeed`
(m/s) and, once computed, `travel_time` (s).
"""

import logging
import threading
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import networkx as nx
import numpy as np

from ..expr.values import Location
from ..utils.exceptions import EmptyNetworkError, UnknownNodeError
from .geodesy import Coordinate, CoordinateLike, haversine_many

logger = logging.getLogger(__name__)

DRIVE = "drive"
WALK = "walk"
NETWORK_KINDS = (DRIVE, WALK)

# m/s, used when an arc has no usable maxspeed (about 50 km/h and walking pace)
DEFAULT_MAXSPEED = {DRIVE: 13.9, WALK: 1.4}


@dataclass(frozen=True)
class Bounds:
    min_lon: float
    min_lat: float
    max_lon: float
    max_lat: float

    def contains(self, lon: float, lat: float) -> bool:
        return self.min_lon <= lon <= self.max_lon and self.min_lat <= lat <= self.max_lat


class RoadNetwork:
    """
    Directed street network with geographic nodes.

    The graph is treated as immutable once loaded, apart from the travel-time
    annotation written by compute_arc_travel_times. Shortest-path trees are
    memoized per source node; the memo may be shared by worker threads.
    """

    def __init__(self, graph: nx.MultiDiGraph, kind: str = DRIVE):
        if graph.number_of_nodes() == 0:
            raise EmptyNetworkError(f"The {kind} network has no nodes")

        self.graph = graph
        self.kind = kind
        self.speed_factor: Optional[float] = None

        ids = sorted(graph.nodes)
        self._node_ids = np.array(ids, dtype=np.int64)
        self._lons = np.array([graph.nodes[n]["x"] for n in ids], dtype=float)
        self._lats = np.array([graph.nodes[n]["y"] for n in ids], dtype=float)
        self._bounds = Bounds(
            float(self._lons.min()), float(self._lats.min()), float(self._lons.max()), float(self._lats.max())
        )
        self._trees: Dict[int, Dict[int, float]] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return (
            f"RoadNetwork(kind={self.kind!r}, nodes={self.number_of_nodes}, "
            f"arcs={self.number_of_arcs}, speed_factor={self.speed_factor})"
        )

    @property
    def bounds(self) -> Bounds:
        return self._bounds

    @property
    def number_of_nodes(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def number_of_arcs(self) -> int:
        return self.graph.number_of_edges()

    @property
    def node_ids(self) -> np.ndarray:
        return self._node_ids

    @property
    def has_travel_times(self) -> bool:
        return self.speed_factor is not None

    def contains(self, coord: CoordinateLike) -> bool:
        lon, lat = coord
        return self._bounds.contains(lon, lat)

    def centroid(self) -> Coordinate:
        """Mean of the node coordinates."""
        return Coordinate(float(self._lons.mean()), float(self._lats.mean()))

    def coordinate(self, node: int) -> Coordinate:
        if node not in self.graph:
            raise UnknownNodeError(node)
        data = self.graph.nodes[node]
        return Coordinate(float(data["x"]), float(data["y"]))

    def location(self, node: int) -> Location:
        coord = self.coordinate(node)
        return Location(int(node), coord.lon, coord.lat)

    def arcs(self) -> Iterator[Tuple[int, int, dict]]:
        return iter(self.graph.edges(data=True))

    def nearest_node(self, coord: CoordinateLike) -> int:
        """
        Node closest to a coordinate by great-circle distance.

        Ties resolve to the smallest node id; distances are compared at
        micrometer resolution so that geometrically exact ties stay ties.
        """
        distances = np.round(haversine_many(coord, self._lons, self._lats), 6)
        return int(self._node_ids[int(np.argmin(distances))])

    def clear_cache(self) -> None:
        with self._lock:
            self._trees.clear()

    def shortest_tree(self, source: int) -> Dict[int, float]:
        """Travel time from a source to every reachable node (memoized Dijkstra, safe across threads)."""
        with self._lock:
            tree = self._trees.get(source)
        if tree is None:
            if source not in self.graph:
                raise UnknownNodeError(source)
            tree = nx.single_source_dijkstra_path_length(self.graph, source, weight="travel_time")
            # first writer wins
            with self._lock:
                tree = self._trees.setdefault(source, tree)
        return tree


def nearest_node(net: RoadNetwork, coord: CoordinateLike) -> int:
    """Node of `net` nearest to `coord`; see RoadNetwork.nearest_node."""
    return net.nearest_node(coord)
