"""
Network bundle directory.

A bundle keeps everything generation needs from the slow ingestion steps:

    nodes.csv, edges.csv              drive network (required)
    walk_nodes.csv, walk_edges.csv    walk network
    stations.csv                      cleaned stations with snapped nodes
    pois.csv                          in-bounds POIs
    meta.json                         name, POI cell size, counts
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from .. import __version__
from ..utils.logging import log_function_call
from .graph import DRIVE, WALK, RoadNetwork
from .loaders import load_network, network_to_frames
from .pois import DEFAULT_CELL_SIZE, PoiIndex, build_poi_index
from .stations import StationSet, dedupe_stations

logger = logging.getLogger(__name__)

NODES_FILE = "nodes.csv"
EDGES_FILE = "edges.csv"
WALK_NODES_FILE = "walk_nodes.csv"
WALK_EDGES_FILE = "walk_edges.csv"
STATIONS_FILE = "stations.csv"
POIS_FILE = "pois.csv"
META_FILE = "meta.json"


@dataclass
class NetworkBundle:
    """Drive network plus the optional walk network, stations and POI grid."""

    drive: RoadNetwork
    walk: Optional[RoadNetwork] = None
    stations: Optional[StationSet] = None
    pois: Optional[PoiIndex] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.meta.get("name", "network")


def _write_network(net: RoadNetwork, directory: Path, nodes_file: str, edges_file: str) -> None:
    nodes, edges = network_to_frames(net)
    nodes.to_csv(directory / nodes_file, index=False)
    edges.to_csv(directory / edges_file, index=False)


@log_function_call
def save_bundle(directory: Union[str, Path], bundle: NetworkBundle) -> Path:
    """
    Write a bundle to a directory, replacing files already there.

    Returns:
        The bundle directory
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    _write_network(bundle.drive, directory, NODES_FILE, EDGES_FILE)
    if bundle.walk is not None:
        _write_network(bundle.walk, directory, WALK_NODES_FILE, WALK_EDGES_FILE)
    if bundle.stations is not None:
        bundle.stations.to_frame().to_csv(directory / STATIONS_FILE, index=False)
    if bundle.pois is not None:
        bundle.pois.to_frame().to_csv(directory / POIS_FILE, index=False)

    meta = dict(bundle.meta)
    meta.setdefault("name", "network")
    meta["version"] = __version__
    meta["drive_nodes"] = bundle.drive.number_of_nodes
    meta["drive_arcs"] = bundle.drive.number_of_arcs
    if bundle.walk is not None:
        meta["walk_nodes"] = bundle.walk.number_of_nodes
    if bundle.stations is not None:
        meta["stations"] = len(bundle.stations)
    if bundle.pois is not None:
        meta["pois"] = bundle.pois.total
        meta["poi_cell_size"] = bundle.pois.cell_size
    with open(directory / META_FILE, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)

    logger.info(f"Saved network bundle '{meta['name']}' to {directory}")
    return directory


@log_function_call
def load_bundle(directory: Union[str, Path]) -> NetworkBundle:
    """
    Read a bundle directory written by save_bundle.

    Raises:
        FileNotFoundError: The directory or its drive network is missing
    """
    directory = Path(directory)
    if not (directory / NODES_FILE).exists():
        raise FileNotFoundError(f"No network bundle at {directory} (missing {NODES_FILE})")

    meta: Dict[str, Any] = {}
    if (directory / META_FILE).exists():
        with open(directory / META_FILE, "r", encoding="utf-8") as f:
            meta = json.load(f)

    drive = load_network(directory / NODES_FILE, kind=DRIVE, edges_path=directory / EDGES_FILE)
    walk = None
    if (directory / WALK_NODES_FILE).exists():
        walk = load_network(directory / WALK_NODES_FILE, kind=WALK, edges_path=directory / WALK_EDGES_FILE)

    stations = None
    if (directory / STATIONS_FILE).exists():
        stations = StationSet.from_frame(pd.read_csv(directory / STATIONS_FILE))
        if any(s.drive_node is None for s in stations):
            # stations added without cleanup; snap them now
            stations = dedupe_stations(stations, drive, walk)

    pois = None
    if (directory / POIS_FILE).exists():
        cell_size = float(meta.get("poi_cell_size", DEFAULT_CELL_SIZE))
        pois = build_poi_index(pd.read_csv(directory / POIS_FILE), drive.bounds, cell_size)

    logger.info(f"Loaded network bundle '{meta.get('name', 'network')}' from {directory}")
    return NetworkBundle(drive=drive, walk=walk, stations=stations, pois=pois, meta=meta)
