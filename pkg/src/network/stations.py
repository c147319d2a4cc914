"""
Bus station set: loading, cleanup and walking-reach queries.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Union

import networkx as nx
import numpy as np
import pandas as pd

from ..expr.values import Location
from ..sampling.rng import RngStream
from ..utils.exceptions import MissingAttributeError, NetworkParseError
from .geodesy import Coordinate, CoordinateLike, haversine_many
from .graph import RoadNetwork
from .routing import walking_times_from

logger = logging.getLogger(__name__)

STATION_COLUMNS = ("station_id", "lon", "lat")
BUNDLE_STATION_COLUMNS = ("station_id", "lon", "lat", "drive_node", "walk_node")


@dataclass(frozen=True)
class Station:
    station_id: int
    lon: float
    lat: float
    drive_node: Optional[int] = None
    walk_node: Optional[int] = None

    @property
    def coordinate(self) -> Coordinate:
        return Coordinate(self.lon, self.lat)

    def location(self) -> Location:
        if self.drive_node is None:
            raise ValueError(f"Station {self.station_id} has not been snapped to the drive network")
        return Location(self.drive_node, self.lon, self.lat)


class StationSet:
    """Ordered collection of stations keyed by station id."""

    def __init__(self, stations: Iterable[Station] = ()):
        self._stations: Dict[int, Station] = {}
        for station in stations:
            self._stations.setdefault(station.station_id, station)
        self._lons = np.array([s.lon for s in self._stations.values()], dtype=float)
        self._lats = np.array([s.lat for s in self._stations.values()], dtype=float)

    def __len__(self) -> int:
        return len(self._stations)

    def __iter__(self) -> Iterator[Station]:
        return iter(self._stations.values())

    def __contains__(self, station_id: object) -> bool:
        return station_id in self._stations

    def __getitem__(self, station_id: int) -> Station:
        return self._stations[station_id]

    def __repr__(self) -> str:
        return f"StationSet({len(self)} stations)"

    @property
    def ids(self) -> List[int]:
        return list(self._stations)

    def locations(self) -> List[Location]:
        return [s.location() for s in self]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(s.station_id, s.lon, s.lat, s.drive_node, s.walk_node) for s in self],
            columns=list(BUNDLE_STATION_COLUMNS),
        ).astype({"drive_node": "Int64", "walk_node": "Int64"})

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "StationSet":
        for column in STATION_COLUMNS:
            if column not in frame.columns:
                raise MissingAttributeError(column, "stations file")

        def node(value) -> Optional[int]:
            return None if pd.isna(value) else int(value)

        stations = []
        for row in frame.itertuples(index=False):
            if pd.isna(row.lon) or pd.isna(row.lat):
                raise MissingAttributeError("lon/lat", f"station {row.station_id}")
            stations.append(
                Station(
                    station_id=int(row.station_id),
                    lon=float(row.lon),
                    lat=float(row.lat),
                    drive_node=node(getattr(row, "drive_node", None)),
                    walk_node=node(getattr(row, "walk_node", None)),
                )
            )
        return cls(stations)

    def within_distance(self, origin: CoordinateLike, meters: float) -> List[int]:
        """Station ids strictly closer than `meters` by great-circle distance."""
        if not len(self):
            return []
        distances = haversine_many(origin, self._lons, self._lats)
        return [sid for sid, d in zip(self._stations, distances) if d < meters]


def load_stations(path: Union[str, Path]) -> StationSet:
    """
    Read a stations CSV (station_id,lon,lat).

    Returns:
        StationSet in file order, not yet snapped or cleaned
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Stations file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(columns=list(STATION_COLUMNS))
    except pd.errors.ParserError as e:
        raise NetworkParseError(f"Cannot parse {path}: {e}") from e
    stations = StationSet.from_frame(frame)
    logger.info(f"Loaded {len(stations)} stations from {path}")
    return stations


def _isolated(net: RoadNetwork, node: int, sample: np.ndarray, cache: Dict[int, bool]) -> bool:
    """True when `node` is unreachable from at least half of the sampled nodes."""
    if node not in cache:
        reaching = nx.ancestors(net.graph, node) | {node}
        unreachable = sum(1 for s in sample if int(s) not in reaching)
        cache[node] = unreachable >= len(sample) / 2.0
    return cache[node]


def dedupe_stations(
    stations: StationSet,
    net: RoadNetwork,
    walk_net: Optional[RoadNetwork] = None,
    sample_size: int = 100,
    seed: int = 0,
) -> StationSet:
    """
    Remove repeated and isolated stations, snapping the rest to the networks.

    A repeated station shares its coordinates with an earlier one (the first
    is kept). An isolated station's nearest node cannot be reached from at
    least half of a seeded sample of network nodes.

    Args:
        stations: Raw station set
        net: Drive network
        walk_net: Walk network, checked the same way when given
        sample_size: Number of nodes sampled for the reachability test
        seed: Seed of the node sample

    Returns:
        Cleaned StationSet with drive_node (and walk_node) set
    """
    rng = RngStream(seed)
    samples = {}
    for network in (net, walk_net):
        if network is not None:
            size = min(sample_size, network.number_of_nodes)
            samples[network.kind] = np.sort(rng.generator.choice(network.node_ids, size=size, replace=False))

    seen = set()
    caches: Dict[str, Dict[int, bool]] = {"drive": {}, "walk": {}}
    kept, duplicates, isolated = [], 0, 0
    for station in stations:
        key = (round(station.lon, 7), round(station.lat, 7))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)

        drive_node = net.nearest_node(station.coordinate)
        walk_node = walk_net.nearest_node(station.coordinate) if walk_net is not None else None
        if _isolated(net, drive_node, samples[net.kind], caches[net.kind]) or (
            walk_net is not None and _isolated(walk_net, walk_node, samples[walk_net.kind], caches[walk_net.kind])
        ):
            isolated += 1
            continue
        kept.append(replace(station, drive_node=drive_node, walk_node=walk_node))

    logger.info(f"Station cleanup: {len(kept)} kept, {duplicates} repeated, {isolated} isolated")
    return StationSet(kept)


def stations_within_walk(
    stations: StationSet,
    walk_net: Optional[RoadNetwork],
    origin: CoordinateLike,
    max_walk: float,
    walk_speed: float,
) -> frozenset:
    """
    Stations a passenger can walk to in less than `max_walk` seconds.

    With a walk network, walking time is the shortest path length from the
    origin's nearest walk node divided by `walk_speed`. Without one, it is
    the great-circle distance divided by `walk_speed`.

    Returns:
        Frozen set of station ids
    """
    if walk_speed <= 0:
        raise ValueError(f"walk speed must be positive, got {walk_speed}")
    if max_walk <= 0 or not len(stations):
        return frozenset()

    if walk_net is None:
        return frozenset(stations.within_distance(origin, max_walk * walk_speed))

    source = walk_net.nearest_node(origin)
    times = walking_times_from(walk_net, source, walk_speed, max_walk)
    found = set()
    for station in stations:
        node = station.walk_node if station.walk_node is not None else walk_net.nearest_node(station.coordinate)
        if node in times:
            found.add(station.station_id)
    return frozenset(found)
