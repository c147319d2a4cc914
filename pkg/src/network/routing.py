"""
Travel times on a road network: arc annotation, point-to-point shortest
paths and travel-time matrices.
"""

import logging
import math
from typing import List, Optional, Sequence

import networkx as nx
import numpy as np
from joblib import Parallel, delayed

from ..utils.exceptions import NetworkError, UnknownNodeError, UnreachableError
from ..utils.logging import log_function_call
from .graph import RoadNetwork

logger = logging.getLogger(__name__)


def compute_arc_travel_times(
    net: RoadNetwork, speed_factor: float, equal_speed: Optional[float] = None
) -> RoadNetwork:
    """
    Annotate every arc with tt = speed_factor * length / maxspeed.

    Args:
        net: Network to annotate in place
        speed_factor: Value in (0, 1] (item `max_speed_factor`)
        equal_speed: If given, replaces every arc's maxspeed (m/s)

    Returns:
        The same network, for chaining
    """
    if not 0.0 < speed_factor <= 1.0:
        raise ValueError(f"speed factor must be in (0, 1], got {speed_factor}")
    if equal_speed is not None and equal_speed <= 0:
        raise ValueError(f"equal speed must be positive, got {equal_speed}")

    for _, _, data in net.graph.edges(data=True):
        speed = equal_speed if equal_speed is not None else data["maxspeed"]
        length = data["length"]
        data["travel_time"] = 0.0 if length == 0 else speed_factor * length / speed

    net.speed_factor = speed_factor
    net.clear_cache()
    logger.debug(f"Computed travel times on {net.number_of_arcs} {net.kind} arcs (speed factor {speed_factor})")
    return net


def shortest_travel_time(net: RoadNetwork, u: int, v: int) -> float:
    """
    Shortest travel time between two nodes, in seconds.

    Raises:
        UnknownNodeError: Either node is not in the network
        UnreachableError: No path from u to v
    """
    if not net.has_travel_times:
        raise NetworkError("Travel times have not been computed on this network")
    if v not in net.graph:
        raise UnknownNodeError(v)
    if u == v:
        if u not in net.graph:
            raise UnknownNodeError(u)
        return 0.0
    tree = net.shortest_tree(u)
    if v not in tree:
        raise UnreachableError(u, v)
    return float(tree[v])


def _matrix_row(net: RoadNetwork, source: int, targets: Sequence[int]) -> List[float]:
    tree = net.shortest_tree(source)
    return [0.0 if t == source else float(tree.get(t, math.nan)) for t in targets]


@log_function_call
def travel_time_matrix(net: RoadNetwork, nodes: Sequence[int], n_jobs: int = 1) -> np.ndarray:
    """
    Shortest travel times between every ordered pair of nodes.

    Args:
        net: Network with computed travel times
        nodes: Node ids; row and column order follows this list
        n_jobs: Worker threads for the per-source Dijkstra runs

    Returns:
        |nodes| x |nodes| array in seconds; NaN marks an unreachable pair
    """
    if not net.has_travel_times:
        raise NetworkError("Travel times have not been computed on this network")
    for node in nodes:
        if node not in net.graph:
            raise UnknownNodeError(node)

    nodes = list(nodes)
    if n_jobs == 1 or len(nodes) < 2:
        rows = [_matrix_row(net, s, nodes) for s in nodes]
    else:
        rows = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(_matrix_row)(net, s, nodes) for s in nodes)

    matrix = np.array(rows, dtype=float).reshape(len(nodes), len(nodes))
    unreachable = int(np.isnan(matrix).sum())
    if unreachable:
        logger.warning(f"{unreachable} unreachable location pairs in travel-time matrix")
    return matrix


def walking_times_from(net: RoadNetwork, source: int, walk_speed: float, max_walk: float) -> dict:
    """
    Walking time (s) from a node to every node reachable in under `max_walk`.

    Arc times are length / walk_speed, ignoring the arcs' maxspeed.
    """
    cutoff = max_walk * walk_speed
    lengths = nx.single_source_dijkstra_path_length(net.graph, source, cutoff=cutoff, weight="length")
    return {node: length / walk_speed for node, length in lengths.items() if length / walk_speed < max_walk}
