"""
Configuration file parser.

Reads the JSON configuration of an instance family, rejects unknown items,
checks value types, applies defaults and converts every dimensioned value to
seconds / meters / meters per second. Semantic checks that need the whole
model (name resolution, dependency cycles) or a network (coordinate bounds)
live in validation.py.
"""

import hashlib
import json
import logging
import math
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Tuple, Union

from ..utils.exceptions import (
    ConfigError,
    ConfigSyntaxError,
    MissingFieldError,
    TypeMismatchError,
    UnknownItemError,
)
from .models import (
    ATTRIBUTE_TYPES,
    LOCS_OPTIONS,
    PARAMETER_TYPES,
    PDF_FAMILIES,
    PLACE_KINDS,
    SHAPED_FAMILIES,
    AttributeSpec,
    InstanceConfig,
    MobilityMethodSpec,
    ParameterSpec,
    PdfSpec,
    PlaceSpec,
)
from .units import CANONICAL_UNIT, UNIT_KEYS, canonicalize_units, dimension_of_unit

logger = logging.getLogger(__name__)

TOP_LEVEL_ITEMS = frozenset(
    [
        "network",
        "seed",
        "problem",
        "fixed_lines",
        "max_speed_factor",
        "replicas",
        "requests",
        "instance_filename",
        "places",
        "parameters",
        "attributes",
        "method_pois",
        "travel_time_matrix",
        "equal_speed",
    ]
)
PLACE_ITEMS = frozenset(
    ["name", "type", "lon", "lat", "centroid", "class", "length_lon", "length_lat", "radius", "length_unit"]
)
PARAMETER_ITEMS = frozenset(
    ["name", "type", "value", "time_unit", "length_unit", "speed_unit", "size", "locs"]
)
ATTRIBUTE_ITEMS = frozenset(
    [
        "name",
        "type",
        "time_unit",
        "length_unit",
        "speed_unit",
        "pdf",
        "expression",
        "constraints",
        "subset_primitives",
        "subset_locations",
        "subset_zones",
        "weights",
        "output_csv",
        "dynamism",
        "static_probability",
    ]
)
PDF_ITEMS = frozenset(["type", "family", "name", "loc", "scale", "aux"])
METHOD_POIS_ITEMS = frozenset(["locations", "pdf", "length_unit"])

# singular spellings seen in older configuration files
PARAMETER_TYPE_ALIASES = {"array_location": "array_locations", "array_zone": "array_zones"}


# ----------------------------------------------------------------- type helpers


def _check_keys(obj: Dict[str, Any], allowed: Iterable[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise UnknownItemError(key, where)


def _require(obj: Dict[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise MissingFieldError(key, where)
    return obj[key]


def _as_int(value: Any, item: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatchError(item, "an integer", value)
    return value


def _as_real(value: Any, item: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatchError(item, "a number", value)
    return float(value)


def _as_bool(value: Any, item: str) -> bool:
    if not isinstance(value, bool):
        raise TypeMismatchError(item, "a boolean", value)
    return value


def _as_str(value: Any, item: str) -> str:
    if not isinstance(value, str):
        raise TypeMismatchError(item, "a string", value)
    return value


def _as_object(value: Any, item: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise TypeMismatchError(item, "an object", value)
    return value


def _as_list(value: Any, item: str) -> List[Any]:
    if not isinstance(value, list):
        raise TypeMismatchError(item, "an array", value)
    return value


def _as_str_list(value: Any, item: str) -> Tuple[str, ...]:
    return tuple(_as_str(v, item) for v in _as_list(value, item))


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def _unit_of(obj: Dict[str, Any], where: str) -> Optional[Tuple[str, str]]:
    """
    Return (dimension, unit tag) declared on an object, if any.

    The tag decides the dimension, so a walking speed declared with
    `"time_unit": "kmh"` is still read as a speed.
    """
    declared = [(key, obj[key]) for key in UNIT_KEYS.values() if key in obj]
    if not declared:
        return None
    if len(declared) > 1:
        raise ConfigError(f"{where} declares more than one unit: {[k for k, _ in declared]}")
    key, tag = declared[0]
    tag = _as_str(tag, f"{where}.{key}")
    dimension = dimension_of_unit(tag)
    if UNIT_KEYS[dimension] != key:
        logger.warning(f"{where}: unit '{tag}' given as {key}, read as {UNIT_KEYS[dimension]}")
    return dimension, tag


def _unit_fields(unit: Optional[Tuple[str, str]]) -> Dict[str, str]:
    if unit is None:
        return {}
    dimension, _ = unit
    return {UNIT_KEYS[dimension]: CANONICAL_UNIT[dimension]}


def _convert(value: float, unit: Optional[Tuple[str, str]]) -> float:
    if unit is None:
        return value
    dimension, tag = unit
    return canonicalize_units(value, dimension, tag)


# ----------------------------------------------------------------- item parsers


def _parse_pdf(raw: Any, where: str, unit: Optional[Tuple[str, str]] = None) -> PdfSpec:
    obj = _as_object(raw, where)
    _check_keys(obj, PDF_ITEMS, where)

    if "type" in obj:
        family = _as_str(obj["type"], f"{where}.type")
    elif "family" in obj:
        family = _as_str(obj["family"], f"{where}.family")
    else:
        raise MissingFieldError("type", where)
    if family not in PDF_FAMILIES:
        raise TypeMismatchError(f"{where}.type", f"one of {', '.join(PDF_FAMILIES)}", family)

    loc = _convert(_as_real(_require(obj, "loc", where), f"{where}.loc"), unit)
    scale = _convert(_as_real(_require(obj, "scale", where), f"{where}.scale"), unit)
    if scale < 0:
        raise TypeMismatchError(f"{where}.scale", "a non-negative number", scale)

    aux = None
    if family in SHAPED_FAMILIES:
        aux = _as_real(_require(obj, "aux", f"{where} ({family})"), f"{where}.aux")
        if aux <= 0:
            raise TypeMismatchError(f"{where}.aux", "a positive number", aux)
    elif "aux" in obj:
        raise ConfigError(f"{where}: family '{family}' takes no 'aux' parameter")

    return PdfSpec(family=family, loc=loc, scale=scale, aux=aux)


def _parse_place(raw: Any, index: int) -> PlaceSpec:
    where = f"places[{index}]"
    obj = _as_object(raw, where)
    _check_keys(obj, PLACE_ITEMS, where)

    name = _as_str(_require(obj, "name", where), f"{where}.name")
    where = f"place '{name}'"
    kind = _as_str(_require(obj, "type", where), f"{where}.type")
    if kind not in PLACE_KINDS:
        raise TypeMismatchError(f"{where}.type", "'location' or 'zone'", kind)

    length_unit = _as_str(obj.get("length_unit", "m"), f"{where}.length_unit")
    unit = ("length", length_unit)

    has_coords = "lon" in obj or "lat" in obj
    centroid = _as_bool(obj.get("centroid", False), f"{where}.centroid")
    if has_coords and ("lon" not in obj or "lat" not in obj):
        raise MissingFieldError("lat" if "lon" in obj else "lon", where)
    if has_coords == centroid:
        raise ConfigError(f"{where}: give exactly one of lon/lat or centroid=true")

    lon = _as_real(obj["lon"], f"{where}.lon") if has_coords else None
    lat = _as_real(obj["lat"], f"{where}.lat") if has_coords else None

    place_class = None
    if "class" in obj:
        place_class = _as_str(obj["class"], f"{where}.class")
        if place_class != "school":
            raise TypeMismatchError(f"{where}.class", "'school'", place_class)

    length_lon = length_lat = radius = None
    if kind == "zone":
        is_rectangle = "length_lon" in obj or "length_lat" in obj
        is_circle = "radius" in obj
        if is_rectangle == is_circle:
            raise ConfigError(f"{where}: give exactly one of length_lon/length_lat or radius")
        if is_rectangle:
            length_lon = _convert(_as_real(_require(obj, "length_lon", where), f"{where}.length_lon"), unit)
            length_lat = _convert(_as_real(_require(obj, "length_lat", where), f"{where}.length_lat"), unit)
        else:
            radius = _convert(_as_real(obj["radius"], f"{where}.radius"), unit)
    elif any(k in obj for k in ("length_lon", "length_lat", "radius")):
        raise ConfigError(f"{where}: a location takes no shape sub-items")

    return PlaceSpec(
        name=name,
        kind=kind,
        lon=lon,
        lat=lat,
        centroid=centroid,
        place_class=place_class,
        length_lon=length_lon,
        length_lat=length_lat,
        radius=radius,
        length_unit="m",
    )


def _convert_primitive(value: Any, item: str, unit: Optional[Tuple[str, str]]) -> Any:
    if isinstance(value, bool) or isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        converted = _convert(float(value), unit) if unit else value
        if isinstance(value, int) and unit and float(converted).is_integer():
            return int(converted)
        return converted
    raise TypeMismatchError(item, "a primitive value", value)


def _parse_parameter(raw: Any, index: int) -> ParameterSpec:
    where = f"parameters[{index}]"
    obj = _as_object(raw, where)
    _check_keys(obj, PARAMETER_ITEMS, where)

    name = _as_str(_require(obj, "name", where), f"{where}.name")
    where = f"parameter '{name}'"
    ptype = _as_str(_require(obj, "type", where), f"{where}.type")
    ptype = PARAMETER_TYPE_ALIASES.get(ptype, ptype)
    if ptype not in PARAMETER_TYPES:
        raise TypeMismatchError(f"{where}.type", f"one of {', '.join(PARAMETER_TYPES)}", ptype)

    unit = _unit_of(obj, where)
    size = _as_int(obj["size"], f"{where}.size") if "size" in obj else None
    locs = None
    if "locs" in obj:
        locs = _as_str(obj["locs"], f"{where}.locs")
        if locs not in LOCS_OPTIONS:
            raise TypeMismatchError(f"{where}.locs", "'random' or 'schools'", locs)

    if ptype == "string":
        value = _as_str(_require(obj, "value", where), f"{where}.value")
    elif ptype == "integer":
        value = _as_int(_require(obj, "value", where), f"{where}.value")
        if unit is not None:
            value = _round_half_up(_convert(float(value), unit))
    elif ptype == "real":
        value = _convert(_as_real(_require(obj, "value", where), f"{where}.value"), unit)
    elif ptype == "array_primitives":
        value = tuple(
            _convert_primitive(v, f"{where}.value", unit)
            for v in _as_list(_require(obj, "value", where), f"{where}.value")
        )
    else:
        value = _as_str_list(obj.get("value", []), f"{where}.value")
        if size is None:
            size = len(value)
        if size < len(value):
            raise ConfigError(f"{where}: size {size} is smaller than the {len(value)} given names")
        if size > len(value) and locs is None:
            raise MissingFieldError("locs", where)

    return ParameterSpec(
        name=name, type=ptype, value=value, size=size, locs=locs, **_unit_fields(unit)
    )


def _parse_attribute(raw: Any, index: int) -> AttributeSpec:
    where = f"attributes[{index}]"
    obj = _as_object(raw, where)
    _check_keys(obj, ATTRIBUTE_ITEMS, where)

    name = _as_str(_require(obj, "name", where), f"{where}.name")
    where = f"attribute '{name}'"
    atype = _as_str(_require(obj, "type", where), f"{where}.type")
    if atype not in ATTRIBUTE_TYPES:
        raise TypeMismatchError(f"{where}.type", f"one of {', '.join(ATTRIBUTE_TYPES)}", atype)

    unit = _unit_of(obj, where)
    pdf = _parse_pdf(obj["pdf"], f"{where}.pdf", unit) if "pdf" in obj else None

    expression = None
    if "expression" in obj:
        raw_expression = obj["expression"]
        if isinstance(raw_expression, list):
            if len(raw_expression) != 1:
                raise TypeMismatchError(f"{where}.expression", "a string or a one-element array", raw_expression)
            raw_expression = raw_expression[0]
        expression = _as_str(raw_expression, f"{where}.expression")

    constraints = _as_str_list(obj.get("constraints", []), f"{where}.constraints")

    subsets = {
        key: _as_str(obj[key], f"{where}.{key}")
        for key in ("subset_primitives", "subset_locations", "subset_zones")
        if key in obj
    }
    sources = [s for s in ("pdf", "expression") if s in obj] + list(subsets)
    if len(sources) > 1:
        raise ConfigError(f"{where}: at most one value source allowed, got {', '.join(sources)}")

    weights = None
    if "weights" in obj:
        weights = tuple(_as_real(w, f"{where}.weights") for w in _as_list(obj["weights"], f"{where}.weights"))
        if any(w < 0 for w in weights):
            raise TypeMismatchError(f"{where}.weights", "non-negative numbers", list(weights))
        if not subsets:
            raise ConfigError(f"{where}: weights need a subset_* source")

    dynamism = None
    if "dynamism" in obj:
        dynamism = _as_real(obj["dynamism"], f"{where}.dynamism")
        if 1.0 < dynamism <= 100.0:
            dynamism /= 100.0
        if not 0.0 <= dynamism <= 1.0:
            raise TypeMismatchError(f"{where}.dynamism", "a fraction in [0,1] or a percentage", dynamism)
        if expression is not None:
            raise ConfigError(f"{where}: an expression and a dynamism target are exclusive")

    static_probability = None
    if "static_probability" in obj:
        static_probability = _as_real(obj["static_probability"], f"{where}.static_probability")
        if not 0.0 <= static_probability <= 1.0:
            raise TypeMismatchError(f"{where}.static_probability", "a probability in [0,1]", static_probability)

    return AttributeSpec(
        name=name,
        type=atype,
        pdf=pdf,
        expression=expression,
        constraints=constraints,
        weights=weights,
        output_csv=_as_bool(obj.get("output_csv", True), f"{where}.output_csv"),
        dynamism=dynamism,
        static_probability=static_probability,
        **subsets,
        **_unit_fields(unit),
    )


def _parse_method_pois(raw: Any) -> Tuple[MobilityMethodSpec, ...]:
    entries = raw if isinstance(raw, list) else [raw]
    methods = []
    for index, entry in enumerate(entries):
        where = f"method_pois[{index}]"
        obj = _as_object(entry, where)
        _check_keys(obj, METHOD_POIS_ITEMS, where)
        locations = _as_str_list(_require(obj, "locations", where), f"{where}.locations")
        if len(locations) != 2:
            raise TypeMismatchError(f"{where}.locations", "a pair of location attributes", list(locations))
        length_unit = _as_str(obj.get("length_unit", "m"), f"{where}.length_unit")
        pdf = _parse_pdf(_require(obj, "pdf", where), f"{where}.pdf", ("length", length_unit))
        methods.append(MobilityMethodSpec(locations=(locations[0], locations[1]), pdf=pdf))
    return tuple(methods)


def _parse_equal_speed(raw: Any) -> float:
    if isinstance(raw, dict):
        _check_keys(raw, ("value", "speed_unit"), "equal_speed")
        value = _as_real(_require(raw, "value", "equal_speed"), "equal_speed.value")
        unit = _as_str(raw.get("speed_unit", "mps"), "equal_speed.speed_unit")
        value = canonicalize_units(value, "speed", unit)
    else:
        value = _as_real(raw, "equal_speed")
    if value <= 0:
        raise TypeMismatchError("equal_speed", "a positive speed", value)
    return value


# ----------------------------------------------------------------------- public


def parse_config(text: Union[str, IO[str]]) -> InstanceConfig:
    """
    Parse configuration text into a typed InstanceConfig.

    Args:
        text: JSON document or a readable text stream

    Returns:
        InstanceConfig with canonical units and defaults applied

    Raises:
        ConfigSyntaxError: Malformed JSON (reports line and column)
        UnknownItemError: An item or sub-item name is not recognised
        TypeMismatchError: A value has the wrong type or range
        MissingFieldError: A required item or sub-item is absent
    """
    if not isinstance(text, str):
        text = text.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSyntaxError(e.msg, e.lineno, e.colno) from e

    obj = _as_object(raw, "configuration")
    _check_keys(obj, TOP_LEVEL_ITEMS, "configuration")

    network = _as_str(_require(obj, "network", "configuration"), "network")
    requests = _as_int(_require(obj, "requests", "configuration"), "requests")
    if requests < 1:
        raise TypeMismatchError("requests", "a positive integer", requests)
    replicas = _as_int(obj.get("replicas", 1), "replicas")
    if replicas < 1:
        raise TypeMismatchError("replicas", "a positive integer", replicas)
    seed = _as_int(obj.get("seed", 0), "seed")
    if seed < 0:
        raise TypeMismatchError("seed", "an unsigned integer", seed)
    max_speed_factor = _as_real(obj.get("max_speed_factor", 1.0), "max_speed_factor")
    if not 0.0 < max_speed_factor <= 1.0:
        raise TypeMismatchError("max_speed_factor", "a number in (0, 1]", max_speed_factor)

    fixed_lines = _as_bool(obj.get("fixed_lines", False), "fixed_lines")
    if fixed_lines:
        logger.warning("fixed-line data unsupported")

    travel_time_matrix = None
    if "travel_time_matrix" in obj:
        travel_time_matrix = _as_str_list(obj["travel_time_matrix"], "travel_time_matrix")

    config = InstanceConfig(
        network_source=network,
        requests=requests,
        seed=seed,
        problem=_as_str(obj.get("problem", ""), "problem"),
        fixed_lines=fixed_lines,
        max_speed_factor=max_speed_factor,
        replicas=replicas,
        instance_filename=_as_str_list(
            obj.get("instance_filename", ["network", "problem", "requests"]), "instance_filename"
        ),
        places=tuple(_parse_place(p, i) for i, p in enumerate(_as_list(obj.get("places", []), "places"))),
        parameters=tuple(
            _parse_parameter(p, i) for i, p in enumerate(_as_list(obj.get("parameters", []), "parameters"))
        ),
        attributes=tuple(
            _parse_attribute(a, i) for i, a in enumerate(_as_list(obj.get("attributes", []), "attributes"))
        ),
        method_pois=_parse_method_pois(obj["method_pois"]) if "method_pois" in obj else (),
        travel_time_matrix=travel_time_matrix,
        equal_speed=_parse_equal_speed(obj["equal_speed"]) if "equal_speed" in obj else None,
    )

    logger.debug(
        f"Parsed configuration '{config.network_source}': {len(config.places)} places, "
        f"{len(config.parameters)} parameters, {len(config.attributes)} attributes"
    )
    return config


def load_config(path: Union[str, Path]) -> InstanceConfig:
    """Read and parse a configuration file (UTF-8 JSON)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def _pdf_to_dict(pdf: PdfSpec) -> Dict[str, Any]:
    out: Dict[str, Any] = {"type": pdf.family, "loc": pdf.loc, "scale": pdf.scale}
    if pdf.aux is not None:
        out["aux"] = pdf.aux
    return out


def config_to_dict(config: InstanceConfig) -> Dict[str, Any]:
    """Canonical dictionary form of a configuration (canonical units, no unset fields)."""
    out: Dict[str, Any] = {
        "network": config.network_source,
        "seed": config.seed,
        "problem": config.problem,
        "fixed_lines": config.fixed_lines,
        "max_speed_factor": config.max_speed_factor,
        "replicas": config.replicas,
        "requests": config.requests,
        "instance_filename": list(config.instance_filename),
    }

    places = []
    for place in config.places:
        item: Dict[str, Any] = {"name": place.name, "type": place.kind}
        if place.centroid:
            item["centroid"] = True
        else:
            item["lon"], item["lat"] = place.lon, place.lat
        if place.place_class is not None:
            item["class"] = place.place_class
        if place.is_rectangle:
            item["length_lon"], item["length_lat"] = place.length_lon, place.length_lat
        if place.radius is not None:
            item["radius"] = place.radius
        item["length_unit"] = place.length_unit
        places.append(item)
    out["places"] = places

    parameters = []
    for parameter in config.parameters:
        item = {"name": parameter.name, "type": parameter.type}
        value = parameter.value
        item["value"] = list(value) if isinstance(value, tuple) else value
        for key in ("time_unit", "length_unit", "speed_unit", "size", "locs"):
            if getattr(parameter, key) is not None:
                item[key] = getattr(parameter, key)
        parameters.append(item)
    out["parameters"] = parameters

    attributes = []
    for attribute in config.attributes:
        item = {"name": attribute.name, "type": attribute.type}
        for key in ("time_unit", "length_unit", "speed_unit"):
            if getattr(attribute, key) is not None:
                item[key] = getattr(attribute, key)
        if attribute.pdf is not None:
            item["pdf"] = _pdf_to_dict(attribute.pdf)
        if attribute.expression is not None:
            item["expression"] = attribute.expression
        if attribute.constraints:
            item["constraints"] = list(attribute.constraints)
        for key in ("subset_primitives", "subset_locations", "subset_zones"):
            if getattr(attribute, key) is not None:
                item[key] = getattr(attribute, key)
        if attribute.weights is not None:
            item["weights"] = list(attribute.weights)
        item["output_csv"] = attribute.output_csv
        if attribute.dynamism is not None:
            item["dynamism"] = attribute.dynamism
        if attribute.static_probability is not None:
            item["static_probability"] = attribute.static_probability
        attributes.append(item)
    out["attributes"] = attributes

    if config.method_pois:
        out["method_pois"] = [
            {"locations": list(m.locations), "pdf": _pdf_to_dict(m.pdf)} for m in config.method_pois
        ]
    if config.travel_time_matrix is not None:
        out["travel_time_matrix"] = list(config.travel_time_matrix)
    if config.equal_speed is not None:
        out["equal_speed"] = config.equal_speed
    return out


def serialize_config(config: InstanceConfig) -> str:
    """Serialize a configuration to canonical JSON text."""
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True)


def config_hash(config: InstanceConfig) -> str:
    """Stable short hash of the canonical configuration, recorded in instance metadata."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()[:16]
