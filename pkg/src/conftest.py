"""
Shared fixtures: a small grid city with stations and POIs, the DARP and
ODBRP reference configurations, and the worked examples the measures are
checked against.
"""

import copy
import json
from typing import Any, Dict

import numpy as np
import pandas as pd
import pytest

from src.config.parser import parse_config
from src.config.validation import validate_config
from src.metrics.dispersion import DispersionRequest
from src.network.bundle import NetworkBundle
from src.network.geodesy import Coordinate
from src.network.graph import DEFAULT_MAXSPEED, DRIVE, WALK
from src.network.loaders import synth_grid_network
from src.network.pois import build_poi_index
from src.network.stations import Station, StationSet, dedupe_stations

GRID_ORIGIN = Coordinate(-87.65, 41.85)
GRID_SIZE = 20
GRID_SPACING = 100.0
STATION_STEP = 3


def make_grid_bundle(size: int = GRID_SIZE, spacing: float = GRID_SPACING, with_pois: bool = True) -> NetworkBundle:
    """Grid drive and walk networks, a station every STATION_STEP nodes, POIs on a 500 m grid."""
    drive = synth_grid_network(size, size, spacing, DEFAULT_MAXSPEED[DRIVE], origin=GRID_ORIGIN, kind=DRIVE)
    walk = synth_grid_network(size, size, spacing, DEFAULT_MAXSPEED[WALK], origin=GRID_ORIGIN, kind=WALK)

    stations = []
    for r in range(0, size, STATION_STEP):
        for c in range(0, size, STATION_STEP):
            coord = drive.coordinate(r * size + c)
            stations.append(Station(station_id=len(stations) + 1, lon=coord.lon, lat=coord.lat))
    cleaned = dedupe_stations(StationSet(stations), drive, walk)

    pois = None
    if with_pois:
        rng = np.random.default_rng(3)
        bounds = drive.bounds
        frame = pd.DataFrame(
            {
                "lon": rng.uniform(bounds.min_lon, bounds.max_lon, size=200),
                "lat": rng.uniform(bounds.min_lat, bounds.max_lat, size=200),
            }
        )
        pois = build_poi_index(frame, bounds, cell_size=500.0)

    return NetworkBundle(drive=drive, walk=walk, stations=cleaned, pois=pois, meta={"name": "grid"})


@pytest.fixture
def grid_bundle() -> NetworkBundle:
    return make_grid_bundle()


DARP_CONFIG: Dict[str, Any] = {
    "network": "grid",
    "problem": "DARP",
    "seed": 7,
    "replicas": 1,
    "requests": 25,
    "instance_filename": ["network", "problem", "requests"],
    "parameters": [
        {"name": "min_planning_period", "type": "integer", "value": 7, "time_unit": "h"},
        {"name": "max_planning_period", "type": "integer", "value": 10, "time_unit": "h"},
        {"name": "depots", "type": "array_locations", "size": 1, "locs": "random"},
    ],
    "attributes": [
        {"name": "origin", "type": "location"},
        {"name": "destination", "type": "location"},
        {"name": "wheelchair_requirement", "type": "integer", "pdf": {"type": "uniform", "loc": 0, "scale": 1}},
        {
            "name": "direct_travel_time",
            "type": "integer",
            "time_unit": "s",
            "expression": "dtt(origin,destination)",
            "output_csv": False,
        },
        {
            "name": "earliest_departure",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "normal", "loc": 30600, "scale": 3600},
            "constraints": ["earliest_departure >= min_planning_period"],
        },
        {
            "name": "lead_time",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "uniform", "loc": 0, "scale": 600},
            "output_csv": False,
        },
        {
            "name": "time_stamp",
            "type": "integer",
            "time_unit": "s",
            "expression": ["earliest_departure - lead_time"],
            "constraints": ["time_stamp >= min_planning_period", "time_stamp <= max_planning_period"],
        },
        {
            "name": "time_window_size",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "uniform", "loc": 300, "scale": 300},
            "output_csv": False,
        },
        {
            "name": "latest_departure",
            "type": "integer",
            "time_unit": "s",
            "expression": "earliest_departure + time_window_size",
        },
        {
            "name": "earliest_arrival",
            "type": "integer",
            "time_unit": "s",
            "expression": "earliest_departure + direct_travel_time",
        },
        {
            "name": "latest_arrival",
            "type": "integer",
            "time_unit": "s",
            "expression": "earliest_arrival + time_window_size",
            "constraints": ["latest_arrival <= max_planning_period"],
        },
    ],
    "travel_time_matrix": ["depots", "origin", "destination"],
}

ODBRP_CONFIG: Dict[str, Any] = {
    "network": "grid",
    "problem": "ODBRP",
    "seed": 11,
    "replicas": 1,
    "requests": 20,
    "places": [{"name": "zone_center", "type": "zone", "centroid": True, "radius": 2000, "length_unit": "m"}],
    "parameters": [
        {"name": "min_planning_period", "type": "integer", "value": 6, "time_unit": "h"},
        {"name": "max_planning_period", "type": "integer", "value": 9, "time_unit": "h"},
        {"name": "zone_dest", "type": "array_zones", "size": 1, "value": ["zone_center"]},
    ],
    "attributes": [
        {"name": "origin", "type": "location"},
        {"name": "destination", "type": "location", "subset_zones": "zone_dest"},
        {
            "name": "direct_travel_time",
            "type": "integer",
            "time_unit": "s",
            "expression": "dtt(origin,destination)",
            "output_csv": False,
        },
        {
            "name": "earliest_departure",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "uniform", "loc": 25200, "scale": 7200},
            "constraints": ["earliest_departure >= min_planning_period"],
        },
        {
            "name": "max_walking",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "uniform", "loc": 300, "scale": 300},
            "output_csv": False,
        },
        {"name": "walk_speed", "type": "real", "time_unit": "kmh", "pdf": {"type": "uniform", "loc": 4, "scale": 1}},
        {
            "name": "stops_orgn",
            "type": "array_primitives",
            "expression": "stops(origin)",
            "constraints": ["len(stops_orgn) > 0"],
        },
        {
            "name": "stops_dest",
            "type": "array_primitives",
            "expression": "stops(destination)",
            "constraints": ["len(stops_dest) > 0", "not (set(stops_orgn) & set(stops_dest))"],
        },
        {
            "name": "lead_time",
            "type": "integer",
            "time_unit": "s",
            "pdf": {"type": "uniform", "loc": 0, "scale": 600},
            "output_csv": False,
        },
        {
            "name": "time_stamp",
            "type": "integer",
            "time_unit": "s",
            "expression": ["earliest_departure - lead_time"],
            "constraints": ["time_stamp >= min_planning_period", "time_stamp <= max_planning_period"],
            "static_probability": 0.5,
        },
        {
            "name": "latest_arrival",
            "type": "integer",
            "time_unit": "s",
            "expression": "earliest_departure + (direct_travel_time * 1.5)",
            "constraints": ["latest_arrival <= max_planning_period"],
        },
    ],
    "travel_time_matrix": ["bus_stations"],
}


@pytest.fixture
def darp_raw() -> Dict[str, Any]:
    return copy.deepcopy(DARP_CONFIG)


@pytest.fixture
def odbrp_raw() -> Dict[str, Any]:
    return copy.deepcopy(ODBRP_CONFIG)


def validated(raw: Dict[str, Any], bundle: NetworkBundle):
    """Parse a raw configuration and validate it against a bundle's drive network."""
    return validate_config(parse_config(json.dumps(raw)), bundle.drive)


# Announcement scenarios over the period [0, 10], five requests each
TABLE1_SCENARIOS = {
    "even": ([2, 4, 6, 8, 10], 0.0, 8.0, 1.0),
    "mixed": ([1, 2, 5, 8, 9], 2.0, 8.0, 0.75),
    "early_burst": ([1, 2, 3, 4, 5], 6.125, 10.125, 1.0 - 6.125 / 10.125),
    "simultaneous": ([5, 5, 5, 5, 5], 20.0, 20.0, 0.0),
}


class TableTravel:
    """Symmetric travel times from a table; unlisted pairs take a default."""

    def __init__(self, pairs: Dict[tuple, float], default: float = 1000.0):
        self.pairs = {frozenset(k): float(v) for k, v in pairs.items()}
        self.default = default

    def __call__(self, a, b) -> float:
        if a == b:
            return 0.0
        return self.pairs.get(frozenset((a, b)), self.default)


@pytest.fixture
def dispersion_example():
    """Four requests whose dispersion with th_s=10, n=2 is mu=90, omega=13, gd=103."""
    direct = {"i": 102, "j": 84, "k": 85, "m": 89}
    windows = {"i": (105, 250), "j": (110, 250), "k": (105, 250), "m": (5, 100)}
    pairs = {
        ("o_j", "o_i"): 7,
        ("d_j", "d_i"): 8,
        ("o_j", "o_k"): 19,
        ("d_j", "d_k"): 26,
        ("o_i", "o_k"): 13,
        ("d_i", "d_k"): 18,
        ("o_k", "d_m"): 11,
        ("d_m", "o_i"): 23,
    }
    pairs.update({(f"o_{r}", f"d_{r}"): t for r, t in direct.items()})
    requests = [
        DispersionRequest(origin=f"o_{r}", destination=f"d_{r}", earliest_departure=e, latest_arrival=l)
        for r, (e, l) in windows.items()
    ]
    return requests, TableTravel(pairs)
