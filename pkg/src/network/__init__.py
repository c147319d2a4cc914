"""
Street networks: loading, travel times, stations, POI grids and geodesy.
"""

from .bundle import NetworkBundle, load_bundle, save_bundle
from .geodesy import EARTH_RADIUS_M, Coordinate, destination_point, haversine, haversine_many
from .graph import DEFAULT_MAXSPEED, DRIVE, WALK, Bounds, RoadNetwork, nearest_node
from .loaders import load_network, network_to_frames, synth_grid_network
from .pois import PoiIndex, build_poi_index, load_pois
from .routing import compute_arc_travel_times, shortest_travel_time, travel_time_matrix
from .stations import Station, StationSet, dedupe_stations, load_stations, stations_within_walk
from .zones import random_point_in_zone, zone_contains

__all__ = [
    "Bounds",
    "Coordinate",
    "DEFAULT_MAXSPEED",
    "DRIVE",
    "EARTH_RADIUS_M",
    "NetworkBundle",
    "PoiIndex",
    "RoadNetwork",
    "Station",
    "StationSet",
    "WALK",
    "build_poi_index",
    "compute_arc_travel_times",
    "dedupe_stations",
    "destination_point",
    "haversine",
    "haversine_many",
    "load_bundle",
    "load_network",
    "load_pois",
    "load_stations",
    "nearest_node",
    "network_to_frames",
    "random_point_in_zone",
    "save_bundle",
    "shortest_travel_time",
    "stations_within_walk",
    "synth_grid_network",
    "travel_time_matrix",
    "zone_contains",
]
