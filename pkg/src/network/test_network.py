"""
Tests for network loading, geodesy, travel times, stations, zones and POIs.
"""

import math

import networkx as nx
import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from joblib import Parallel, delayed

from src.config.models import PlaceSpec, ResolvedPlace
from src.conftest import GRID_ORIGIN, make_grid_bundle
from src.network.bundle import load_bundle, save_bundle
from src.network.geodesy import Coordinate, apply_offset, destination_point, haversine, offset_meters
from src.network.graph import DEFAULT_MAXSPEED, DRIVE, WALK, RoadNetwork
from src.network.loaders import load_network, synth_grid_network
from src.network.pois import build_poi_index, load_pois
from src.network.routing import compute_arc_travel_times, shortest_travel_time, travel_time_matrix
from src.network.stations import Station, StationSet, dedupe_stations, load_stations, stations_within_walk
from src.network.zones import random_point_in_zone, zone_contains
from src.sampling.rng import RngStream
from src.utils.exceptions import (
    InvalidDimensionError,
    MissingAttributeError,
    NetworkError,
    NetworkParseError,
    UnknownNodeError,
    UnreachableError,
)

lons = st.floats(min_value=-179.0, max_value=179.0)
lats = st.floats(min_value=-80.0, max_value=80.0)
coordinates = st.builds(Coordinate, lons, lats)


def grid(rows=3, cols=3, spacing=100.0, speed=10.0, kind=DRIVE):
    return synth_grid_network(rows, cols, spacing, speed, origin=GRID_ORIGIN, kind=kind)


def write_graphml(path, edges, missing_speed=()):
    graph = nx.MultiDiGraph()
    for node in {n for u, v, _ in edges for n in (u, v)}:
        graph.add_node(node, x=GRID_ORIGIN.lon + node * 0.001, y=GRID_ORIGIN.lat)
    for u, v, length in edges:
        data = {"length": length}
        if (u, v) not in missing_speed:
            data["maxspeed"] = 20.0
        graph.add_edge(u, v, **data)
    nx.write_graphml(graph, path)
    return path


class TestLoaders:
    def test_synth_grid(self):
        net = grid()
        assert net.number_of_nodes == 9
        assert net.number_of_arcs == 24
        assert haversine(net.coordinate(0), net.coordinate(1)) == pytest.approx(100.0, rel=1e-3)
        assert haversine(net.coordinate(0), net.coordinate(3)) == pytest.approx(100.0, rel=1e-3)

    def test_synth_grid_dimensions(self):
        with pytest.raises(InvalidDimensionError):
            synth_grid_network(1, 5, 100.0, 10.0)
        with pytest.raises(InvalidDimensionError):
            synth_grid_network(3, 3, 0.0, 10.0)

    def test_graphml_missing_maxspeed_uses_default(self, tmp_path, caplog):
        path = write_graphml(tmp_path / "net.graphml", [(0, 1, 50.0), (1, 2, 70.0)], missing_speed={(1, 2)})
        with caplog.at_level("WARNING"):
            net = load_network(path)
        assert net.number_of_nodes == 3
        speeds = {(u, v): d["maxspeed"] for u, v, d in net.arcs()}
        assert speeds[(0, 1)] == 20.0
        assert speeds[(1, 2)] == DEFAULT_MAXSPEED[DRIVE]
        assert "1 drive arcs without maxspeed" in caplog.text

    def test_walk_default_speed(self, tmp_path):
        path = write_graphml(tmp_path / "walk.graphml", [(0, 1, 50.0)], missing_speed={(0, 1)})
        net = load_network(path, kind=WALK)
        assert next(net.arcs())[2]["maxspeed"] == DEFAULT_MAXSPEED[WALK]

    def test_csv_pair(self, tmp_path):
        pd.DataFrame({"node_id": [1, 2], "lon": [0.0, 0.001], "lat": [0.0, 0.0]}).to_csv(
            tmp_path / "city_nodes.csv", index=False
        )
        pd.DataFrame({"u": [1], "v": [2], "length": [111.0], "maxspeed": [None]}).to_csv(
            tmp_path / "city_edges.csv", index=False
        )
        net = load_network(tmp_path / "city_nodes.csv")
        assert net.number_of_arcs == 1
        assert next(net.arcs())[2]["maxspeed"] == DEFAULT_MAXSPEED[DRIVE]

    def test_unknown_endpoint(self, tmp_path):
        pd.DataFrame({"node_id": [1], "lon": [0.0], "lat": [0.0]}).to_csv(tmp_path / "nodes.csv", index=False)
        pd.DataFrame({"u": [1], "v": [9], "length": [10.0]}).to_csv(tmp_path / "edges.csv", index=False)
        with pytest.raises(NetworkParseError):
            load_network(tmp_path / "nodes.csv")

    def test_missing_length(self, tmp_path):
        pd.DataFrame({"node_id": [1, 2], "lon": [0.0, 0.1], "lat": [0.0, 0.0]}).to_csv(
            tmp_path / "nodes.csv", index=False
        )
        pd.DataFrame({"u": [1], "v": [2], "length": [None]}).to_csv(tmp_path / "edges.csv", index=False)
        with pytest.raises(MissingAttributeError):
            load_network(tmp_path / "nodes.csv")

    def test_unparseable_graphml(self, tmp_path):
        path = tmp_path / "broken.graphml"
        path.write_text("<graphml><node", encoding="utf-8")
        with pytest.raises(NetworkParseError):
            load_network(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_network(tmp_path / "absent.graphml")

    def test_nearest_node(self):
        net = grid()
        target = net.coordinate(4)
        assert net.nearest_node((target.lon + 1e-6, target.lat)) == 4
        # halfway between nodes 0 and 1: the smaller id wins
        a, b = net.coordinate(0), net.coordinate(1)
        assert net.nearest_node(((a.lon + b.lon) / 2, a.lat)) == 0


class TestGeodesy:
    def test_one_degree_of_latitude(self):
        assert haversine((0.0, 0.0), (0.0, 1.0)) == pytest.approx(111_194.9, rel=1e-5)

    @settings(max_examples=100)
    @given(coordinates, coordinates, coordinates)
    def test_triangle_inequality(self, a, b, c):
        assert haversine(a, c) <= haversine(a, b) + haversine(b, c) + 1e-3

    @settings(max_examples=100)
    @given(coordinates, st.floats(min_value=1.0, max_value=50_000.0), st.floats(min_value=0.0, max_value=2 * math.pi))
    def test_destination_point_distance(self, origin, distance, bearing):
        target = destination_point(origin, distance, bearing)
        assert haversine(origin, target) == pytest.approx(distance, rel=1e-6)

    def test_destination_point_bearing(self):
        north = destination_point(GRID_ORIGIN, 1000.0, 0.0)
        east = destination_point(GRID_ORIGIN, 1000.0, math.pi / 2)
        assert north.lat > GRID_ORIGIN.lat and north.lon == pytest.approx(GRID_ORIGIN.lon)
        assert east.lon > GRID_ORIGIN.lon and east.lat == pytest.approx(GRID_ORIGIN.lat, abs=1e-4)

    def test_offsets_invert(self):
        point = apply_offset(GRID_ORIGIN, 120.0, -45.0)
        dx, dy = offset_meters(GRID_ORIGIN, point)
        assert dx == pytest.approx(120.0)
        assert dy == pytest.approx(-45.0)


def random_network(rng, size):
    graph = nx.MultiDiGraph()
    for node in range(size):
        graph.add_node(node, x=float(node) * 0.001, y=0.0)
    for _ in range(int(rng.integers(size, size * 3))):
        u, v = (int(x) for x in rng.integers(0, size, size=2))
        if u != v:
            graph.add_edge(u, v, length=float(rng.integers(10, 500)), maxspeed=float(rng.integers(5, 30)))
    return RoadNetwork(graph)


def all_pairs_by_relaxation(net):
    """Floyd-Warshall over the minimum parallel-arc travel times; inf where unreachable."""
    size = net.number_of_nodes
    times = np.full((size, size), math.inf)
    np.fill_diagonal(times, 0.0)
    for u, v, data in net.arcs():
        times[u, v] = min(times[u, v], data["travel_time"])
    for via in range(size):
        times = np.minimum(times, times[:, [via]] + times[[via], :])
    return times


class TestRouting:
    def test_arc_travel_time(self):
        net = compute_arc_travel_times(grid(speed=10.0), 0.5)
        assert shortest_travel_time(net, 0, 1) == pytest.approx(5.0)
        assert shortest_travel_time(net, 0, 8) == pytest.approx(20.0)

    def test_equal_speed(self):
        net = compute_arc_travel_times(grid(speed=10.0), 1.0, equal_speed=20.0)
        assert shortest_travel_time(net, 0, 2) == pytest.approx(10.0)

    def test_needs_travel_times(self):
        with pytest.raises(NetworkError):
            shortest_travel_time(grid(), 0, 1)

    def test_speed_factor_range(self):
        with pytest.raises(ValueError):
            compute_arc_travel_times(grid(), 1.5)

    @settings(max_examples=1000, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=8))
    def test_dijkstra_matches_relaxation(self, seed, size):
        net = compute_arc_travel_times(random_network(np.random.default_rng(seed), size), 1.0)
        expected = all_pairs_by_relaxation(net)
        for u in range(size):
            for v in range(size):
                if math.isinf(expected[u, v]):
                    with pytest.raises(UnreachableError):
                        shortest_travel_time(net, u, v)
                else:
                    assert shortest_travel_time(net, u, v) == pytest.approx(expected[u, v])

    def test_shared_trees_across_threads(self):
        net = compute_arc_travel_times(grid(rows=6, cols=6), 1.0)
        sources = [s for s in range(36) for _ in range(4)]
        trees = Parallel(n_jobs=8, prefer="threads")(delayed(net.shortest_tree)(s) for s in sources)

        assert len(net._trees) == 36
        for source, tree in zip(sources, trees):
            assert tree is net.shortest_tree(source)
        reference = compute_arc_travel_times(grid(rows=6, cols=6), 1.0)
        assert all(trees[4 * s] == reference.shortest_tree(s) for s in range(36))

    def test_matrix(self):
        graph = grid().graph.copy()
        graph.add_node(99, x=GRID_ORIGIN.lon, y=GRID_ORIGIN.lat + 0.01)
        net = compute_arc_travel_times(RoadNetwork(graph), 1.0)
        matrix = travel_time_matrix(net, [0, 8, 99])
        assert matrix[0, 0] == 0.0
        assert matrix[0, 1] == pytest.approx(40.0)
        assert math.isnan(matrix[0, 2])
        assert matrix[2, 2] == 0.0

        threaded = travel_time_matrix(net, [0, 8, 99], n_jobs=2)
        np.testing.assert_array_equal(np.isnan(matrix), np.isnan(threaded))

        with pytest.raises(UnknownNodeError):
            travel_time_matrix(net, [0, 1234])


class TestStations:
    def test_dedupe(self):
        graph = grid().graph.copy()
        graph.add_node(50, x=GRID_ORIGIN.lon + 0.05, y=GRID_ORIGIN.lat + 0.05)
        net = RoadNetwork(graph)
        corner = net.coordinate(0)
        far = net.coordinate(50)
        stations = StationSet(
            [
                Station(1, corner.lon, corner.lat),
                Station(2, corner.lon, corner.lat),
                Station(3, far.lon, far.lat),
                Station(4, *net.coordinate(8)),
            ]
        )
        cleaned = dedupe_stations(stations, net)
        assert cleaned.ids == [1, 4]
        assert cleaned[1].drive_node == 0
        assert cleaned[4].drive_node == 8

    def test_load(self, tmp_path):
        pd.DataFrame({"station_id": [5, 6], "lon": [0.0, 1.0], "lat": [0.0, 1.0]}).to_csv(
            tmp_path / "s.csv", index=False
        )
        stations = load_stations(tmp_path / "s.csv")
        assert stations.ids == [5, 6]
        pd.DataFrame({"station_id": [5], "lon": [0.0]}).to_csv(tmp_path / "bad.csv", index=False)
        with pytest.raises(MissingAttributeError):
            load_stations(tmp_path / "bad.csv")

    def test_within_walk(self):
        walk = grid(rows=5, cols=2, spacing=100.0, kind=WALK)
        stations = StationSet(
            [
                Station(1, *walk.coordinate(0), walk_node=0),
                Station(2, *walk.coordinate(4), walk_node=4),
                Station(3, *walk.coordinate(6), walk_node=6),
            ]
        )
        origin = walk.coordinate(0)
        # 200 m and 300 m away along the network; walking 1 m/s for under 250 s
        assert stations_within_walk(stations, walk, origin, 250.0, 1.0) == frozenset({1, 2})
        assert stations_within_walk(stations, walk, origin, 200.0, 1.0) == frozenset({1})
        assert stations_within_walk(stations, None, origin, 250.0, 1.0) == frozenset({1, 2})
        assert stations_within_walk(stations, walk, origin, 0.0, 1.0) == frozenset()
        with pytest.raises(ValueError):
            stations_within_walk(stations, walk, origin, 250.0, 0.0)


def zone(**shape):
    spec = PlaceSpec(name="z", kind="zone", centroid=True, **shape)
    return ResolvedPlace(spec=spec, lon=GRID_ORIGIN.lon, lat=GRID_ORIGIN.lat)


class TestZonesAndPois:
    @pytest.mark.parametrize("shape", [{"radius": 500.0}, {"length_lon": 800.0, "length_lat": 300.0}])
    def test_samples_stay_inside(self, shape):
        z = zone(**shape)
        rng = RngStream(2)
        for _ in range(500):
            assert zone_contains(z, random_point_in_zone(z, rng))

    def test_circle_membership(self):
        z = zone(radius=500.0)
        assert zone_contains(z, destination_point(GRID_ORIGIN, 499.0, 1.0))
        assert not zone_contains(z, destination_point(GRID_ORIGIN, 501.0, 1.0))

    def test_poi_counts(self, caplog):
        net = grid(rows=11, cols=11, spacing=100.0)
        bounds = net.bounds
        frame = pd.DataFrame(
            {
                "lon": [bounds.min_lon + 1e-5, bounds.min_lon + 2e-5, bounds.max_lon - 1e-5, bounds.max_lon + 1.0],
                "lat": [bounds.min_lat + 1e-5, bounds.min_lat + 2e-5, bounds.max_lat - 1e-5, bounds.max_lat],
            }
        )
        with caplog.at_level("WARNING"):
            index = build_poi_index(frame, bounds, cell_size=600.0)
        assert "1 POIs outside the network bounds" in caplog.text
        assert index.total == 3
        assert (index.n_rows, index.n_cols) == (2, 2)
        assert index.weights() == [2, 0, 0, 1]
        first = index.zone(0)
        assert zone_contains(first, (bounds.min_lon + 1e-5, bounds.min_lat + 1e-5))

    def test_load_pois(self, tmp_path):
        net = grid()
        pd.DataFrame({"longitude": [0.0]}).to_csv(tmp_path / "p.csv", index=False)
        with pytest.raises(MissingAttributeError):
            load_pois(tmp_path / "p.csv", net.bounds)


class TestBundle:
    def test_round_trip(self, tmp_path):
        bundle = make_grid_bundle(size=8)
        save_bundle(tmp_path, bundle)
        loaded = load_bundle(tmp_path)

        assert loaded.name == "grid"
        assert loaded.drive.number_of_nodes == 64
        assert loaded.walk.number_of_arcs == bundle.walk.number_of_arcs
        assert loaded.stations.ids == bundle.stations.ids
        assert [s.drive_node for s in loaded.stations] == [s.drive_node for s in bundle.stations]
        assert loaded.pois.total == bundle.pois.total
        assert loaded.meta["drive_nodes"] == 64

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_bundle(tmp_path / "absent")
