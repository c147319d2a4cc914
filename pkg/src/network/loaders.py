"""
Network ingestion from GraphML or node/edge CSV files, and the synthetic
grid used for tests and desk-scale benchmarks.
"""

import logging
import math
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Optional, Tuple, Union

import networkx as nx
import pandas as pd

from ..utils.exceptions import (
    EmptyNetworkError,
    InvalidDimensionError,
    MissingAttributeError,
    NetworkParseError,
)
from ..utils.logging import log_function_call
from .geodesy import EARTH_RADIUS_M, Coordinate
from .graph import DEFAULT_MAXSPEED, DRIVE, NETWORK_KINDS, RoadNetwork

logger = logging.getLogger(__name__)

NODE_COLUMNS = ("node_id", "lon", "lat")
EDGE_COLUMNS = ("u", "v", "length", "maxspeed")


def _to_float(value) -> Optional[float]:
    """Numeric value of an attribute, or None when absent or not a number."""
    if value is None:
        return None
    try:
        result = float(value)
    except (TypeError, ValueError):
        return None
    return None if math.isnan(result) else result


def _to_node_id(value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as e:
        raise NetworkParseError(f"Node id {value!r} is not an integer") from e


def _build(nodes: pd.DataFrame, edges: pd.DataFrame, kind: str, source: str) -> RoadNetwork:
    """Assemble a RoadNetwork from validated node and edge tables."""
    if nodes.empty:
        raise EmptyNetworkError(f"No nodes in {source}")

    graph = nx.MultiDiGraph(kind=kind)
    for row in nodes.itertuples(index=False):
        node = _to_node_id(row.node_id)
        lon, lat = _to_float(row.lon), _to_float(row.lat)
        if lon is None:
            raise MissingAttributeError("lon", f"node {node}")
        if lat is None:
            raise MissingAttributeError("lat", f"node {node}")
        if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
            raise NetworkParseError(f"Node {node} has invalid coordinates ({lon}, {lat})")
        graph.add_node(node, x=lon, y=lat)

    default_speed = DEFAULT_MAXSPEED[kind]
    filled = 0
    for row in edges.itertuples(index=False):
        u, v = _to_node_id(row.u), _to_node_id(row.v)
        for end in (u, v):
            if end not in graph:
                raise NetworkParseError(f"Edge {u}->{v} references unknown node {end}")
        length = _to_float(row.length)
        if length is None:
            raise MissingAttributeError("length", f"edge {u}->{v}")
        if length < 0 or (length == 0 and u != v):
            raise NetworkParseError(f"Edge {u}->{v} has non-positive length {length}")
        speed = _to_float(getattr(row, "maxspeed", None))
        if speed is None or speed <= 0:
            speed = default_speed
            filled += 1
        graph.add_edge(u, v, length=length, maxspeed=speed)

    if filled:
        logger.warning(f"{filled} {kind} arcs without maxspeed, using default {default_speed} m/s")

    net = RoadNetwork(graph, kind=kind)
    logger.info(f"Loaded {kind} network from {source}: {net.number_of_nodes} nodes, {net.number_of_arcs} arcs")
    return net


def _read_graphml(path: Path) -> Tuple[pd.DataFrame, pd.DataFrame]:
    try:
        raw = nx.read_graphml(path)
    except (ET.ParseError, nx.NetworkXError, ValueError, KeyError) as e:
        raise NetworkParseError(f"Cannot parse GraphML {path}: {e}") from e

    node_rows = []
    for node, data in raw.nodes(data=True):
        if not data:
            raise NetworkParseError(f"Edge references unknown node {node!r} in {path}")
        if "x" not in data:
            raise MissingAttributeError("x", f"node {node}")
        if "y" not in data:
            raise MissingAttributeError("y", f"node {node}")
        node_rows.append((node, data["x"], data["y"]))

    edge_rows = []
    directed = raw.is_directed()
    for u, v, data in raw.edges(data=True):
        row = (u, v, data.get("length"), data.get("maxspeed"))
        edge_rows.append(row)
        if not directed and u != v:
            edge_rows.append((v, u, row[2], row[3]))

    return (
        pd.DataFrame(node_rows, columns=list(NODE_COLUMNS)),
        pd.DataFrame(edge_rows, columns=list(EDGE_COLUMNS)),
    )


def _read_csv(path: Path, required: Tuple[str, ...], element: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(required))
    except pd.errors.ParserError as e:
        raise NetworkParseError(f"Cannot parse {path}: {e}") from e
    for column in required:
        if column not in frame.columns:
            raise MissingAttributeError(column, element)
    return frame


@log_function_call
def load_network(
    path: Union[str, Path], kind: str = DRIVE, edges_path: Optional[Union[str, Path]] = None
) -> RoadNetwork:
    """
    Load a road network from GraphML or from a node/edge CSV pair.

    Args:
        path: GraphML file, or the nodes CSV (node_id,lon,lat)
        kind: 'drive' or 'walk'; selects the default maxspeed
        edges_path: Edges CSV (u,v,length,maxspeed); defaults to the nodes
            file name with 'nodes' replaced by 'edges'

    Returns:
        RoadNetwork with bounds computed and missing maxspeeds filled

    Raises:
        NetworkParseError: Unreadable file or an edge with an unknown endpoint
        MissingAttributeError: A node without coordinates or an edge without length
        EmptyNetworkError: No nodes
    """
    if kind not in NETWORK_KINDS:
        raise ValueError(f"network kind must be one of {NETWORK_KINDS}, got {kind!r}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Network file not found: {path}")

    if path.suffix.lower() == ".graphml":
        nodes, edges = _read_graphml(path)
        return _build(nodes, edges, kind, str(path))

    if edges_path is None:
        edges_path = path.with_name(path.name.replace("nodes", "edges"))
        if edges_path == path:
            raise NetworkParseError(f"Cannot infer the edges file for {path}; pass it explicitly")
    edges_path = Path(edges_path)
    if not edges_path.exists():
        raise FileNotFoundError(f"Edges file not found: {edges_path}")

    nodes = _read_csv(path, NODE_COLUMNS, "nodes file")
    edges = _read_csv(edges_path, ("u", "v", "length"), "edges file")
    return _build(nodes, edges, kind, str(path))


def network_to_frames(net: RoadNetwork) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Node and edge tables of a network, in the CSV layout load_network reads."""
    nodes = pd.DataFrame(
        [(int(n), d["x"], d["y"]) for n, d in sorted(net.graph.nodes(data=True))],
        columns=list(NODE_COLUMNS),
    )
    edges = pd.DataFrame(
        [(int(u), int(v), d["length"], d["maxspeed"]) for u, v, d in net.graph.edges(data=True)],
        columns=list(EDGE_COLUMNS),
    )
    return nodes, edges


def synth_grid_network(
    rows: int,
    cols: int,
    spacing_m: float,
    maxspeed: float,
    origin: Coordinate = Coordinate(0.0, 0.0),
    kind: str = DRIVE,
) -> RoadNetwork:
    """
    Build a bidirectional lattice network.

    Node (r, c) gets id r * cols + c and sits `spacing_m` meters north / east
    of its neighbours; every arc has length `spacing_m`.

    Raises:
        InvalidDimensionError: rows or cols below 2, or non-positive spacing/speed
    """
    if rows < 2 or cols < 2:
        raise InvalidDimensionError(f"Grid needs at least 2 rows and 2 columns, got {rows}x{cols}")
    if spacing_m <= 0 or maxspeed <= 0:
        raise InvalidDimensionError(f"Grid spacing and speed must be positive, got {spacing_m}, {maxspeed}")

    dlat = math.degrees(spacing_m / EARTH_RADIUS_M)
    dlon = math.degrees(spacing_m / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))

    graph = nx.MultiDiGraph(kind=kind)
    for r in range(rows):
        for c in range(cols):
            graph.add_node(r * cols + c, x=origin.lon + c * dlon, y=origin.lat + r * dlat)

    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            neighbours = []
            if c + 1 < cols:
                neighbours.append(node + 1)
            if r + 1 < rows:
                neighbours.append(node + cols)
            for other in neighbours:
                graph.add_edge(node, other, length=float(spacing_m), maxspeed=float(maxspeed))
                graph.add_edge(other, node, length=float(spacing_m), maxspeed=float(maxspeed))

    logger.debug(f"Synthesized {rows}x{cols} grid, spacing {spacing_m} m")
    return RoadNetwork(graph, kind=kind)
