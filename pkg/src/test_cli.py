"""
Tests for the command-line interface.
"""

import json
import logging

import networkx as nx
import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli import cli
from src.conftest import DARP_CONFIG, GRID_ORIGIN, make_grid_bundle
from src.network.bundle import NetworkBundle, load_bundle, save_bundle
from src.network.geodesy import Coordinate
from src.network.graph import DRIVE, RoadNetwork
from src.network.loaders import synth_grid_network
from src.network.stations import Station, StationSet


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.setenv("ENVIRONMENT", "testing")
    monkeypatch.delenv("REQGEN_BUNDLE_DIR", raising=False)
    monkeypatch.delenv("REQGEN_LOG_LEVEL", raising=False)
    yield CliRunner()
    # the CLI installs its own handlers; give log capture back to pytest
    for name in ("reqgen", "src"):
        logger = logging.getLogger(name)
        logger.handlers.clear()
        logger.setLevel(logging.NOTSET)
        logger.propagate = True


@pytest.fixture
def bundle_dir(tmp_path):
    path = tmp_path / "bundle"
    save_bundle(path, make_grid_bundle())
    return path


def write_config(path, raw):
    path.write_text(json.dumps(raw), encoding="utf-8")
    return path


def write_requests(path, rows):
    pd.DataFrame(rows).to_csv(path, index=False)
    return path


# Endpoint nodes of the four-request dispersion example and the arcs between
# them; each request's station pair sits on its own arc with the direct time.
DISPERSION_NODES = {"o_i": 1, "d_i": 2, "o_j": 3, "d_j": 4, "o_k": 5, "d_k": 6, "o_m": 7, "d_m": 8}
DISPERSION_ARCS = {
    ("o_j", "o_i"): 7,
    ("d_j", "d_i"): 8,
    ("o_j", "o_k"): 19,
    ("d_j", "d_k"): 26,
    ("o_i", "o_k"): 13,
    ("d_i", "d_k"): 18,
    ("o_k", "d_m"): 11,
    ("d_m", "o_i"): 23,
}
DISPERSION_REQUESTS = {"i": (102, 105, 250), "j": (84, 110, 250), "k": (85, 105, 250), "m": (89, 5, 100)}


@pytest.fixture
def dispersion_files(tmp_path):
    """Bundle and instance CSV of the four-request example (gd 103 with th_s=10, n=2)."""
    graph = nx.MultiDiGraph(kind=DRIVE)
    for node in range(1, 19):
        graph.add_node(node, x=GRID_ORIGIN.lon + 0.001 * node, y=GRID_ORIGIN.lat)
    arcs = [(DISPERSION_NODES[a], DISPERSION_NODES[b], t) for (a, b), t in DISPERSION_ARCS.items()]
    stations = []
    rows = []
    for index, (name, (direct, earliest, latest)) in enumerate(DISPERSION_REQUESTS.items()):
        first, second = 11 + 2 * index, 12 + 2 * index
        arcs.append((first, second, direct))
        for node in (first, second):
            coord = graph.nodes[node]
            stations.append(Station(station_id=100 + node, lon=coord["x"], lat=coord["y"], drive_node=node))
        row = {}
        for role, node in (("origin", DISPERSION_NODES[f"o_{name}"]), ("destination", DISPERSION_NODES[f"d_{name}"])):
            row.update({f"{role}_lon": graph.nodes[node]["x"], f"{role}_lat": graph.nodes[node]["y"]})
            row[f"{role}_node"] = node
        row.update(
            earliest_departure=earliest,
            latest_arrival=latest,
            stops_orgn=json.dumps([100 + first]),
            stops_dest=json.dumps([100 + second]),
        )
        rows.append(row)
    for u, v, seconds in arcs:
        graph.add_edge(u, v, length=float(seconds), maxspeed=1.0)
        graph.add_edge(v, u, length=float(seconds), maxspeed=1.0)

    bundle = tmp_path / "example"
    network = NetworkBundle(drive=RoadNetwork(graph), stations=StationSet(stations), meta={"name": "example"})
    save_bundle(bundle, network)
    return bundle, write_requests(tmp_path / "example.csv", rows)


@pytest.fixture
def darp_instance(runner, bundle_dir, tmp_path):
    config = write_config(tmp_path / "darp.json", DARP_CONFIG)
    out = tmp_path / "out"
    result = runner.invoke(
        cli, ["generate", str(config), "--bundle", str(bundle_dir), "--out", str(out), "--verify", "--no-progress"]
    )
    assert result.exit_code == 0, result.output
    return out / "grid_DARP_25_1.csv"


class TestNetworkCommands:
    def test_synth(self, runner, tmp_path):
        target = tmp_path / "grid"
        args = ["net", "synth", "--bundle", str(target), "--rows", "3", "--cols", "3", "--spacing", "100"]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        assert "grid: 9 nodes, 24 arcs" in result.output
        bundle = load_bundle(target)
        assert bundle.drive.number_of_nodes == 9
        assert bundle.walk is not None

    def test_stations_and_pois(self, runner, tmp_path, monkeypatch):
        target = tmp_path / "grid"
        monkeypatch.setenv("REQGEN_BUNDLE_DIR", str(target))
        origin = ["--origin-lon", "-87.65", "--origin-lat", "41.85"]
        synth = ["net", "synth", "--rows", "5", "--cols", "5", "--spacing", "100"] + origin
        assert runner.invoke(cli, synth).exit_code == 0

        grid = synth_grid_network(5, 5, 100.0, 13.9, origin=Coordinate(-87.65, 41.85))
        a, b = grid.coordinate(0), grid.coordinate(24)
        stations = pd.DataFrame(
            {"station_id": [1, 2, 3], "lon": [a.lon, b.lon, a.lon], "lat": [a.lat, b.lat, a.lat]}
        )
        stations.to_csv(tmp_path / "stations.csv", index=False)
        result = runner.invoke(cli, ["net", "stations", str(tmp_path / "stations.csv")])
        assert result.exit_code == 0, result.output
        assert "stations: 2 of 3 kept" in result.output

        pd.DataFrame({"lon": [a.lon, b.lon], "lat": [a.lat, b.lat]}).to_csv(tmp_path / "pois.csv", index=False)
        result = runner.invoke(cli, ["net", "pois", str(tmp_path / "pois.csv"), "--cell-size", "200"])
        assert result.exit_code == 0, result.output
        assert "pois: 2 in" in result.output

        bundle = load_bundle(target)
        assert sorted(bundle.stations.ids) == [1, 2]
        assert bundle.pois.total == 2

    def test_walk_before_drive(self, runner, tmp_path):
        graph = tmp_path / "walk.graphml"
        graph.write_text("<graphml/>", encoding="utf-8")
        result = runner.invoke(cli, ["net", "ingest", str(graph), "--kind", "walk", "--bundle", str(tmp_path / "b")])
        assert result.exit_code != 0

    def test_missing_bundle(self, runner, tmp_path):
        config = write_config(tmp_path / "darp.json", DARP_CONFIG)
        result = runner.invoke(cli, ["generate", str(config), "--bundle", str(tmp_path / "absent")])
        assert result.exit_code == 1


class TestGenerate:
    def test_writes_instance_files(self, darp_instance):
        directory = darp_instance.parent
        assert darp_instance.exists()
        assert (directory / "grid_DARP_25_1_tt_matrix.csv").exists()
        assert (directory / "grid_DARP_25_1_meta.json").exists()
        assert len(pd.read_csv(darp_instance)) == 25

    def test_zero_requests_fails(self, runner, bundle_dir, tmp_path):
        raw = dict(DARP_CONFIG, requests=0)
        config = write_config(tmp_path / "zero.json", raw)
        result = runner.invoke(cli, ["generate", str(config), "--bundle", str(bundle_dir), "--out", str(tmp_path)])
        assert result.exit_code == 1
        assert not list(tmp_path.glob("*.csv"))

    def test_malformed_config(self, runner, bundle_dir, tmp_path):
        config = tmp_path / "broken.json"
        config.write_text('{"network": "grid",', encoding="utf-8")
        result = runner.invoke(cli, ["generate", str(config), "--bundle", str(bundle_dir)])
        assert result.exit_code == 1


class TestAnalysis:
    def test_measure(self, runner, bundle_dir, darp_instance, tmp_path):
        report = tmp_path / "report.csv"
        result = runner.invoke(
            cli, ["measure", str(darp_instance), "--bundle", str(bundle_dir), "--csv", str(report)]
        )
        assert result.exit_code == 0, result.output
        assert "requests: 25" in result.output
        assert "gd: " in result.output
        frame = pd.read_csv(report)
        assert {"requests", "rho", "gd"} <= set(frame["key"])

    def test_measure_with_period(self, runner, bundle_dir, tmp_path):
        rows = [{"time_stamp": ts, "latest_departure": ts + 5} for ts in (1, 2, 3, 4, 5)]
        instance = write_requests(tmp_path / "burst.csv", rows)
        result = runner.invoke(cli, ["measure", str(instance), "--bundle", str(bundle_dir), "--period", "0,10"])
        assert result.exit_code == 0, result.output
        assert "lambda: 6.12" in result.output
        assert "eta: 10.12" in result.output
        assert "rho: 0.39" in result.output

    def test_measure_inferred_period_keeps_first_request(self, runner, bundle_dir, tmp_path):
        rows = [{"time_stamp": ts, "latest_departure": ts + 5} for ts in (1, 2, 3, 4, 5)]
        instance = write_requests(tmp_path / "burst.csv", rows)
        result = runner.invoke(cli, ["measure", str(instance), "--bundle", str(bundle_dir)])
        assert result.exit_code == 0, result.output
        assert "planning period: [1.00, 5.00]" in result.output
        # five dynamic requests over four seconds
        assert "theta: 0.80" in result.output
        assert "urgency_mean: 5.00" in result.output

    @pytest.mark.parametrize("period", ["10", "5,1", "a,b"])
    def test_measure_bad_period(self, runner, bundle_dir, tmp_path, period):
        instance = write_requests(tmp_path / "one.csv", [{"time_stamp": 1}])
        result = runner.invoke(cli, ["measure", str(instance), "--bundle", str(bundle_dir), "--period", period])
        assert result.exit_code == 2

    def test_measure_dispersion_example(self, runner, dispersion_files):
        bundle, instance = dispersion_files
        args = ["measure", str(instance), "--bundle", str(bundle), "--th-s", "10", "--n", "2"]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        assert "mu: 90.00" in result.output
        assert "omega: 13.00" in result.output
        assert "gd: 103.00" in result.output

    def test_measure_empty_instance(self, runner, bundle_dir, tmp_path):
        instance = tmp_path / "empty.csv"
        instance.write_text("", encoding="utf-8")
        result = runner.invoke(cli, ["measure", str(instance), "--bundle", str(bundle_dir)])
        assert result.exit_code == 1

    def test_similarity_with_itself(self, runner, bundle_dir, darp_instance, tmp_path):
        matching = tmp_path / "matching.csv"
        result = runner.invoke(
            cli,
            [
                "similarity",
                str(darp_instance),
                str(darp_instance),
                "--bundle",
                str(bundle_dir),
                "--matching",
                str(matching),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "omega: 1.00" in result.output
        frame = pd.read_csv(matching)
        assert len(frame) == 25
        assert (frame["xi"] == 1.0).all()

    def test_similarity_threshold_must_be_positive(self, runner, bundle_dir, darp_instance):
        result = runner.invoke(
            cli,
            ["similarity", str(darp_instance), str(darp_instance), "--bundle", str(bundle_dir), "--th-tt", "0"],
        )
        assert result.exit_code == 2

    def test_similarity_size_mismatch(self, runner, bundle_dir, darp_instance, tmp_path):
        shorter = tmp_path / "shorter.csv"
        pd.read_csv(darp_instance).head(3).to_csv(shorter, index=False)
        result = runner.invoke(cli, ["similarity", str(darp_instance), str(shorter), "--bundle", str(bundle_dir)])
        assert result.exit_code == 1


class TestBenchmark:
    def test_one_group(self, runner, bundle_dir, tmp_path):
        template = write_config(tmp_path / "template.json", DARP_CONFIG)
        out = tmp_path / "bench"
        result = runner.invoke(
            cli,
            [
                "benchmark",
                str(template),
                "--bundle",
                str(bundle_dir),
                "--out",
                str(out),
                "--sizes",
                "6",
                "--dynamism",
                "0.5",
                "--no-progress",
            ],
        )
        assert result.exit_code == 0, result.output
        group = out / "grid_DARP_6_7_10_50_x_x_x"
        assert "[grid_DARP_6_7_10_50_x_x_x]" in result.output
        assert json.loads((group / "config.json").read_text())["requests"] == 6
        assert len(pd.read_csv(group / "grid_DARP_6_1.csv")) == 6

    def test_empty_grid(self, runner, bundle_dir, tmp_path):
        template = write_config(tmp_path / "template.json", DARP_CONFIG)
        out = tmp_path / "bench"
        result = runner.invoke(
            cli, ["benchmark", str(template), "--bundle", str(bundle_dir), "--out", str(out), "--sizes", ""]
        )
        assert result.exit_code == 0
        assert not out.exists()

    def test_unknown_dispersion_class(self, runner, bundle_dir, tmp_path):
        template = write_config(tmp_path / "template.json", DARP_CONFIG)
        result = runner.invoke(cli, ["benchmark", str(template), "--bundle", str(bundle_dir), "--gd", "huge"])
        assert result.exit_code == 1
