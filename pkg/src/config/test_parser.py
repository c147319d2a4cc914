"""
Tests for configuration parsing, units and validation.
"""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config.parser import config_hash, load_config, parse_config, serialize_config
from src.config.units import canonicalize_units, dimension_of_unit
from src.config.validation import validate_config
from src.conftest import DARP_CONFIG, ODBRP_CONFIG, validated
from src.utils.exceptions import (
    ConfigError,
    ConfigSyntaxError,
    CyclicDependencyError,
    DuplicateNameError,
    MissingFieldError,
    OutOfBoundsError,
    ReservedNameError,
    TypeMismatchError,
    UnknownFunctionError,
    UnknownItemError,
    UnknownUnitError,
    UnresolvedReferenceError,
)


def parse(raw):
    return parse_config(json.dumps(raw))


def minimal(**extra):
    raw = {"network": "grid", "requests": 3, "attributes": [{"name": "origin", "type": "location"}]}
    raw.update(extra)
    return raw


class TestUnits:
    def test_conversions(self):
        assert canonicalize_units(2, "time", "h") == 7200
        assert canonicalize_units(1.5, "length", "km") == 1500
        assert canonicalize_units(36, "speed", "kmh") == pytest.approx(10.0)
        assert canonicalize_units(1, "length", "mi") == pytest.approx(1609.344)

    def test_unknown_unit(self):
        with pytest.raises(UnknownUnitError):
            canonicalize_units(1, "time", "days")
        with pytest.raises(UnknownUnitError):
            dimension_of_unit("furlong")

    @settings(max_examples=100)
    @given(
        st.floats(min_value=-1e6, max_value=1e6),
        st.floats(min_value=-1e6, max_value=1e6),
        st.sampled_from([("time", "min"), ("time", "h"), ("length", "km"), ("length", "mi"), ("speed", "kmh")]),
    )
    def test_conversion_is_linear(self, a, b, unit):
        dimension, tag = unit
        total = canonicalize_units(a + b, dimension, tag)
        parts = canonicalize_units(a, dimension, tag) + canonicalize_units(b, dimension, tag)
        assert total == pytest.approx(parts, rel=1e-9, abs=1e-6)


class TestParser:
    def test_darp_configuration(self):
        cfg = parse(DARP_CONFIG)
        assert cfg.requests == 25
        assert cfg.problem == "DARP"
        assert cfg.parameter("min_planning_period").value == 25200
        assert cfg.parameter("max_planning_period").value == 36000
        assert cfg.parameter("depots").size == 1
        assert cfg.attribute("earliest_departure").pdf.loc == 30600
        assert cfg.attribute("time_stamp").expression == "earliest_departure - lead_time"
        assert not cfg.attribute("lead_time").output_csv
        assert cfg.travel_time_matrix == ("depots", "origin", "destination")

    def test_odbrp_configuration(self):
        cfg = parse(ODBRP_CONFIG)
        walk_speed = cfg.attribute("walk_speed").pdf
        assert walk_speed.loc == pytest.approx(4 / 3.6)
        assert walk_speed.scale == pytest.approx(1 / 3.6)
        assert cfg.place("zone_center").radius == 2000
        assert cfg.place("zone_center").centroid
        assert cfg.attribute("time_stamp").static_probability == 0.5
        assert cfg.timestamp_attribute.name == "time_stamp"

    def test_defaults(self):
        cfg = parse(minimal())
        assert cfg.seed == 0
        assert cfg.replicas == 1
        assert cfg.max_speed_factor == 1.0
        assert cfg.instance_filename == ("network", "problem", "requests")

    def test_dynamism_as_percentage(self):
        raw = minimal(attributes=[{"name": "time_stamp", "type": "integer", "dynamism": 40}])
        assert parse(raw).attribute("time_stamp").dynamism == 0.4

    def test_expression_as_one_element_array(self):
        raw = minimal(attributes=[{"name": "x", "type": "integer", "expression": ["1 + 2"]}])
        assert parse(raw).attribute("x").expression == "1 + 2"
        raw["attributes"][0]["expression"] = ["1", "2"]
        with pytest.raises(TypeMismatchError):
            parse(raw)

    def test_singular_array_type_names(self):
        raw = minimal(
            places=[{"name": "home", "type": "location", "lon": 1.0, "lat": 2.0}],
            parameters=[{"name": "homes", "type": "array_location", "value": ["home"]}],
        )
        assert parse(raw).parameter("homes").type == "array_locations"

    def test_unknown_item(self):
        with pytest.raises(UnknownItemError):
            parse(minimal(colour="blue"))
        with pytest.raises(UnknownItemError):
            parse(minimal(attributes=[{"name": "x", "type": "integer", "pdf_type": "normal"}]))

    @pytest.mark.parametrize(
        "change",
        [
            {"requests": "ten"},
            {"requests": 0},
            {"seed": -1},
            {"max_speed_factor": 1.5},
            {"replicas": 0},
        ],
    )
    def test_bad_values(self, change):
        with pytest.raises(TypeMismatchError):
            parse(minimal(**change))

    def test_missing_network(self):
        raw = minimal()
        del raw["network"]
        with pytest.raises(MissingFieldError):
            parse(raw)

    def test_malformed_json(self):
        with pytest.raises(ConfigSyntaxError) as info:
            parse_config('{\n  "network": "grid",\n  "requests": }')
        assert info.value.line == 3

    def test_unknown_pdf_family(self):
        raw = minimal(attributes=[{"name": "x", "type": "real", "pdf": {"type": "zipf", "loc": 0, "scale": 1}}])
        with pytest.raises(TypeMismatchError):
            parse(raw)

    def test_shape_parameter_required(self):
        raw = minimal(attributes=[{"name": "x", "type": "real", "pdf": {"type": "gamma", "loc": 0, "scale": 1}}])
        with pytest.raises(MissingFieldError):
            parse(raw)

    def test_two_value_sources(self):
        raw = minimal(
            attributes=[
                {"name": "x", "type": "real", "pdf": {"type": "normal", "loc": 0, "scale": 1}, "expression": "1"}
            ]
        )
        with pytest.raises(ConfigError):
            parse(raw)

    def test_fixed_lines_warns(self, caplog):
        with caplog.at_level("WARNING"):
            parse(minimal(fixed_lines=True))
        assert "fixed-line data unsupported" in caplog.text

    @pytest.mark.parametrize("raw", [DARP_CONFIG, ODBRP_CONFIG])
    def test_serialize_round_trip(self, raw):
        cfg = parse(raw)
        again = parse_config(serialize_config(cfg))
        assert again == cfg
        assert config_hash(again) == config_hash(cfg)

    def test_hash_changes_with_seed(self):
        assert config_hash(parse(minimal(seed=1))) != config_hash(parse(minimal(seed=2)))

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.json")


class TestValidation:
    def test_reference_configurations(self, darp_raw, odbrp_raw, grid_bundle):
        vcfg = validated(darp_raw, grid_bundle)
        assert vcfg.dependencies["time_stamp"] == ["earliest_departure", "lead_time"]
        assert vcfg.dependencies["direct_travel_time"] == ["origin", "destination"]

        vcfg = validated(odbrp_raw, grid_bundle)
        assert set(vcfg.dependencies["stops_orgn"]) == {"origin", "max_walking", "walk_speed"}
        centroid = grid_bundle.drive.centroid()
        assert vcfg.places["zone_center"].lon == centroid.lon

    def test_cycle(self, grid_bundle):
        raw = minimal(
            attributes=[
                {"name": "a", "type": "integer", "expression": "b + 1"},
                {"name": "b", "type": "integer", "expression": "a + 1"},
            ]
        )
        with pytest.raises(CyclicDependencyError) as info:
            validated(raw, grid_bundle)
        assert set(info.value.cycle) == {"a", "b"}

    def test_self_reference(self, grid_bundle):
        raw = minimal(attributes=[{"name": "a", "type": "integer", "expression": "a + 1"}])
        with pytest.raises(CyclicDependencyError):
            validated(raw, grid_bundle)

    def test_reserved_name(self, grid_bundle):
        raw = minimal(parameters=[{"name": "bus_stations", "type": "integer", "value": 1}])
        with pytest.raises(ReservedNameError):
            validated(raw, grid_bundle)

    def test_duplicate_name(self, grid_bundle):
        raw = minimal(parameters=[{"name": "origin", "type": "integer", "value": 1}])
        with pytest.raises(DuplicateNameError):
            validated(raw, grid_bundle)

    def test_unresolved_reference(self, grid_bundle):
        raw = minimal(attributes=[{"name": "x", "type": "integer", "expression": "y * 2"}])
        with pytest.raises(UnresolvedReferenceError):
            validated(raw, grid_bundle)

    def test_unknown_function(self, grid_bundle):
        raw = minimal(attributes=[{"name": "x", "type": "integer", "expression": "sqrt(4)"}])
        with pytest.raises(UnknownFunctionError):
            validated(raw, grid_bundle)

    def test_place_outside_network(self, grid_bundle):
        raw = minimal(places=[{"name": "far", "type": "location", "lon": 10.0, "lat": 10.0}])
        with pytest.raises(OutOfBoundsError):
            validated(raw, grid_bundle)

    def test_zone_arrays_cannot_be_padded(self, grid_bundle):
        raw = minimal(
            places=[{"name": "z", "type": "zone", "centroid": True, "radius": 100}],
            parameters=[{"name": "zones", "type": "array_zones", "size": 2, "value": ["z"], "locs": "random"}],
        )
        with pytest.raises(ConfigError, match="padded"):
            validated(raw, grid_bundle)

    def test_dynamism_needs_a_period(self, grid_bundle):
        raw = minimal(attributes=[{"name": "time_stamp", "type": "integer", "dynamism": 0.5}])
        with pytest.raises(MissingFieldError):
            validated(raw, grid_bundle)

        raw["attributes"][0]["pdf"] = {"type": "uniform", "loc": 0, "scale": 3600}
        vcfg = validated(raw, grid_bundle)
        assert vcfg.config.attribute("time_stamp").dynamism == 0.5

    def test_dynamism_needs_two_requests(self, grid_bundle):
        raw = minimal(
            requests=1,
            attributes=[
                {
                    "name": "time_stamp",
                    "type": "integer",
                    "dynamism": 0.5,
                    "pdf": {"type": "uniform", "loc": 0, "scale": 10},
                }
            ],
        )
        with pytest.raises(ConfigError):
            validated(raw, grid_bundle)

    def test_weights_must_match_subset(self, grid_bundle):
        raw = minimal(
            parameters=[{"name": "levels", "type": "array_primitives", "value": [1, 2, 3]}],
            attributes=[{"name": "level", "type": "integer", "subset_primitives": "levels", "weights": [1, 1]}],
        )
        with pytest.raises(ConfigError):
            validated(raw, grid_bundle)

    def test_matrix_names_locations(self, grid_bundle):
        raw = minimal(
            attributes=[{"name": "origin", "type": "location"}, {"name": "n", "type": "integer", "expression": "1"}],
            travel_time_matrix=["n"],
        )
        with pytest.raises(TypeMismatchError):
            validate_config(parse(raw), grid_bundle.drive)
