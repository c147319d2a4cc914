"""
Semantic validation of a parsed configuration against a road network.

Checks name uniqueness and reserved names, resolves every reference used by
expressions, constraints, subsets, method_pois, travel_time_matrix and
instance_filename, builds the attribute dependency graph and rejects cycles,
and resolves place coordinates (centroids included) inside the network bounds.
"""

import logging
from typing import TYPE_CHECKING, Dict, List, Set, Tuple

import networkx as nx

from ..expr.ast import BUILTIN_NAMES, called_functions, dependencies
from ..expr.parser import parse_expression
from ..utils.exceptions import (
    ConfigError,
    CyclicDependencyError,
    DuplicateNameError,
    MissingFieldError,
    OutOfBoundsError,
    ReservedNameError,
    TypeMismatchError,
    UnknownFunctionError,
    UnresolvedReferenceError,
)
from .models import (
    BUS_STATIONS,
    MAX_PLANNING_PERIOD,
    MAX_WALKING,
    MIN_PLANNING_PERIOD,
    RESERVED_NAMES,
    WALK_SPEED,
    InstanceConfig,
    ResolvedPlace,
    ValidatedConfig,
)

if TYPE_CHECKING:
    from ..network.graph import RoadNetwork

logger = logging.getLogger(__name__)

SUBSET_PARAMETER_TYPES = {
    "subset_primitives": "array_primitives",
    "subset_locations": "array_locations",
    "subset_zones": "array_zones",
}


def _check_names(cfg: InstanceConfig) -> None:
    seen: Set[str] = set()
    for kind, items in (("place", cfg.places), ("parameter", cfg.parameters), ("attribute", cfg.attributes)):
        for item in items:
            if item.name == BUS_STATIONS:
                raise ReservedNameError(item.name)
            if item.name in RESERVED_NAMES and kind != "attribute":
                raise ReservedNameError(item.name)
            if item.name in seen:
                raise DuplicateNameError(item.name)
            seen.add(item.name)


def _check_parameters(cfg: InstanceConfig) -> None:
    for parameter in cfg.parameters:
        where = f"parameter '{parameter.name}'"
        if parameter.type in ("array_locations", "array_zones"):
            wanted = "location" if parameter.type == "array_locations" else "zone"
            for name in parameter.value:
                place = cfg.place(name)
                if place is None:
                    raise UnresolvedReferenceError(name, where)
                if place.kind != wanted:
                    raise TypeMismatchError(f"{where}.value", f"names of {wanted} places", name)
            if parameter.type == "array_zones" and parameter.size > len(parameter.value):
                raise ConfigError(f"{where}: zone arrays cannot be padded; list all {parameter.size} zones")
            if parameter.locs == "schools" and not any(
                p.place_class == "school" and p.kind == "location" for p in cfg.places
            ):
                raise ConfigError(f"{where}: locs 'schools' needs at least one location with class 'school'")


def _array_length(cfg: InstanceConfig, name: str) -> int:
    parameter = cfg.parameter(name)
    if parameter.type == "array_primitives":
        return len(parameter.value)
    return parameter.size if parameter.size is not None else len(parameter.value)


def _check_attribute_sources(cfg: InstanceConfig) -> None:
    poi_attributes = {name for method in cfg.method_pois for name in method.locations}

    for attribute in cfg.attributes:
        where = f"attribute '{attribute.name}'"
        for key, wanted in SUBSET_PARAMETER_TYPES.items():
            target = getattr(attribute, key)
            if target is None:
                continue
            if key == "subset_locations" and target == BUS_STATIONS:
                continue
            parameter = cfg.parameter(target)
            if parameter is None:
                raise UnresolvedReferenceError(target, where)
            if parameter.type != wanted:
                raise TypeMismatchError(f"{where}.{key}", f"a parameter of type {wanted}", parameter.type)
            if attribute.weights is not None and len(attribute.weights) != _array_length(cfg, target):
                raise ConfigError(
                    f"{where}: {len(attribute.weights)} weights for the {_array_length(cfg, target)} "
                    f"entries of '{target}'"
                )

        if attribute.type == "location":
            if attribute.pdf is not None:
                raise TypeMismatchError(f"{where}.pdf", "absent on a location attribute", "pdf")
            if attribute.subset_primitives is not None:
                raise TypeMismatchError(f"{where}.subset_primitives", "subset_locations or subset_zones", "")
        else:
            if attribute.subset_locations is not None or attribute.subset_zones is not None:
                raise TypeMismatchError(f"{where}.type", "'location' for subset_locations/subset_zones", attribute.type)
            if attribute.pdf is None and attribute.expression is None and attribute.subset_primitives is None:
                if attribute.dynamism is None:
                    raise MissingFieldError("pdf, expression or subset_primitives", where)
            if attribute.pdf is not None and attribute.type not in ("integer", "real"):
                raise TypeMismatchError(f"{where}.pdf", "used on a numeric attribute", attribute.type)

        if attribute.name in poi_attributes:
            if attribute.type != "location":
                raise TypeMismatchError("method_pois.locations", "location attributes", attribute.name)
            if attribute.subset_parameter is not None or attribute.expression is not None:
                raise ConfigError(f"{where}: method_pois locations cannot have their own value source")

    for method in cfg.method_pois:
        for name in method.locations:
            if cfg.attribute(name) is None:
                raise UnresolvedReferenceError(name, "method_pois")
        if method.locations[0] == method.locations[1]:
            raise ConfigError(f"method_pois pair names the same attribute twice: {method.locations[0]}")
    all_names = [n for m in cfg.method_pois for n in m.locations]
    if len(all_names) != len(set(all_names)):
        raise ConfigError("A location attribute appears in more than one method_pois entry")

    dynamism = [a.name for a in cfg.attributes if a.dynamism is not None]
    static = [a.name for a in cfg.attributes if a.static_probability is not None]
    if len(dynamism) > 1:
        raise ConfigError(f"dynamism is set on more than one attribute: {dynamism}")
    if len(static) > 1:
        raise ConfigError(f"static_probability is set on more than one attribute: {static}")
    if dynamism and static and dynamism != static:
        raise ConfigError("dynamism and static_probability must be set on the same (time-stamp) attribute")
    for name in dynamism + static:
        if cfg.attribute(name).type not in ("integer", "real"):
            raise TypeMismatchError(f"attribute '{name}'.type", "numeric for a time-stamp attribute", "")
    for name in dynamism:
        if cfg.requests < 2:
            raise ConfigError(f"attribute '{name}': a dynamism target needs at least 2 requests")
        has_period = cfg.parameter(MIN_PLANNING_PERIOD) is not None and cfg.parameter(MAX_PLANNING_PERIOD) is not None
        pdf = cfg.attribute(name).pdf
        if not has_period and (pdf is None or pdf.family != "uniform"):
            raise MissingFieldError(
                "min_planning_period/max_planning_period or a uniform pdf", f"attribute '{name}' with dynamism"
            )


def _check_outputs(cfg: InstanceConfig) -> None:
    for item in cfg.instance_filename:
        try:
            cfg.item_value(item)
        except KeyError:
            raise UnresolvedReferenceError(item, "instance_filename") from None

    for name in cfg.travel_time_matrix or ():
        if name == BUS_STATIONS:
            continue
        attribute, parameter, place = cfg.attribute(name), cfg.parameter(name), cfg.place(name)
        if attribute is not None and attribute.type == "location":
            continue
        if parameter is not None and parameter.type == "array_locations":
            continue
        if place is not None and place.kind == "location":
            continue
        if attribute is None and parameter is None and place is None:
            raise UnresolvedReferenceError(name, "travel_time_matrix")
        raise TypeMismatchError("travel_time_matrix", "names of location-valued entities", name)


def _parse_expressions(cfg: InstanceConfig) -> Tuple[Dict[str, object], Dict[str, List[Tuple[str, object]]]]:
    """Parse every expression and constraint, resolving identifiers and function names."""
    known = {p.name for p in cfg.places} | {p.name for p in cfg.parameters} | {a.name for a in cfg.attributes}
    expressions: Dict[str, object] = {}
    constraints: Dict[str, List[Tuple[str, object]]] = {}

    for attribute in cfg.attributes:
        sources = []
        if attribute.expression is not None:
            tree = parse_expression(attribute.expression)
            expressions[attribute.name] = tree
            sources.append(("expression", attribute.expression, tree))
        constraints[attribute.name] = []
        for text in attribute.constraints:
            tree = parse_expression(text)
            constraints[attribute.name].append((text, tree))
            sources.append(("constraint", text, tree))

        for label, text, tree in sources:
            where = f"{label} '{text}' of attribute '{attribute.name}'"
            for function in called_functions(tree):
                if function not in BUILTIN_NAMES:
                    raise UnknownFunctionError(function)
            for name in dependencies(tree):
                if name not in known:
                    raise UnresolvedReferenceError(name, where)

    return expressions, constraints


def attribute_dependencies(
    cfg: InstanceConfig, expressions: Dict[str, object], constraints: Dict[str, List[Tuple[str, object]]]
) -> Dict[str, List[str]]:
    """
    Attributes each attribute must be generated after.

    References come from the attribute's expression and constraints; stops()
    also reads max_walking and walk_speed. The two attributes of a
    method_pois pair are placed together, so the first inherits the
    second's references and the second depends on the first.
    """
    attribute_names = [a.name for a in cfg.attributes]
    names = set(attribute_names)
    deps: Dict[str, Set[str]] = {}

    for name in attribute_names:
        trees = [t for _, t in constraints.get(name, [])]
        if name in expressions:
            trees.append(expressions[name])
            if name in dependencies(expressions[name]):
                raise CyclicDependencyError([name, name])
        found: Set[str] = set()
        for tree in trees:
            found |= dependencies(tree) & names
            if "stops" in called_functions(tree):
                found |= {MAX_WALKING, WALK_SPEED} & names
        found.discard(name)
        deps[name] = found

    for method in cfg.method_pois:
        first, second = method.locations
        deps[first] |= deps[second] - {first}
        deps[second] |= {first}

    return {name: sorted(deps[name], key=attribute_names.index) for name in attribute_names}


def _check_acyclic(dependency_map: Dict[str, List[str]]) -> None:
    graph = nx.DiGraph()
    graph.add_nodes_from(dependency_map)
    for name, deps in dependency_map.items():
        graph.add_edges_from((dep, name) for dep in deps)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return
    names = [u for u, _ in cycle] + [cycle[0][0]]
    raise CyclicDependencyError(names)


def _resolve_places(cfg: InstanceConfig, net: "RoadNetwork") -> Dict[str, ResolvedPlace]:
    resolved: Dict[str, ResolvedPlace] = {}
    centroid = net.centroid()
    for place in cfg.places:
        if place.centroid:
            lon, lat = centroid.lon, centroid.lat
        else:
            lon, lat = place.lon, place.lat
            if not net.contains((lon, lat)):
                raise OutOfBoundsError(place.name, lon, lat)
        resolved[place.name] = ResolvedPlace(spec=place, lon=lon, lat=lat)
    return resolved


def validate_config(cfg: InstanceConfig, net: "RoadNetwork") -> ValidatedConfig:
    """
    Validate a parsed configuration against a loaded network.

    Args:
        cfg: Parsed configuration
        net: Drive network the instances will be generated on (not modified)

    Returns:
        ValidatedConfig with resolved place coordinates, parsed expressions
        and the attribute dependency lists

    Raises:
        OutOfBoundsError: A declared coordinate lies outside the network bounds
        UnresolvedReferenceError: A referenced name is not declared
        CyclicDependencyError: Attributes depend on each other in a cycle
        DuplicateNameError: A name is declared twice
        ReservedNameError: A reserved name is redeclared
    """
    _check_names(cfg)
    _check_parameters(cfg)
    _check_attribute_sources(cfg)
    _check_outputs(cfg)

    expressions, constraints = _parse_expressions(cfg)
    dependency_map = attribute_dependencies(cfg, expressions, constraints)
    _check_acyclic(dependency_map)

    places = _resolve_places(cfg, net)

    logger.info(
        f"Configuration valid: {len(cfg.attributes)} attributes, {len(cfg.parameters)} parameters, "
        f"{len(places)} places"
    )
    return ValidatedConfig(
        config=cfg,
        places=places,
        dependencies=dependency_map,
        expressions=expressions,
        constraints=constraints,
    )
