"""
Request synthesis.

A request is generated attribute by attribute in dependency order. After
each attribute is set, its constraints are checked; a violated attribute
with a random source is redrawn up to MAX_ATTRIBUTE_RETRIES times, after
which (or at once, for attributes fully determined by an expression) the
whole request is discarded and started again. An instance gives up after
MAX_RECORD_RESTARTS discarded requests.
"""

import logging
from collections import ChainMap
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ..config.models import BUS_STATIONS, AttributeSpec, ResolvedPlace, ValidatedConfig
from ..expr.evaluator import evaluate
from ..expr.values import Location, Value, coerce_to_type
from ..network.bundle import NetworkBundle
from ..sampling.distributions import sample_pdf, weighted_choice
from ..sampling.rng import RngStream
from ..utils.exceptions import DivisionByZeroError, GenerationError, InfeasibleConfigError, UnreachableError
from .context import NetworkContext
from .order import build_attribute_order
from .placement import apply_poi_method, location_in_zone, random_location, snap

logger = logging.getLogger(__name__)

MAX_ATTRIBUTE_RETRIES = 50
MAX_RECORD_RESTARTS = 10_000

RequestRecord = Dict[str, Value]


def parameter_environment(vcfg: ValidatedConfig, bundle: NetworkBundle, rng: RngStream) -> Dict[str, Any]:
    """
    Values of places and parameters for one instance.

    Location places become their nearest drive node, zones stay resolved
    places. Location arrays padded with `locs` draw their extra entries from
    `rng`, so every replica gets its own.
    """
    cfg, net = vcfg.config, bundle.drive
    env: Dict[str, Any] = {}
    for name, place in vcfg.places.items():
        env[name] = snap(net, place.lon, place.lat) if place.spec.kind == "location" else place

    schools = [p for p in vcfg.places.values() if p.spec.kind == "location" and p.spec.place_class == "school"]
    for parameter in cfg.parameters:
        if parameter.type == "array_locations":
            values = [env[name] for name in parameter.value]
            while len(values) < parameter.size:
                if parameter.locs == "schools":
                    school = weighted_choice(schools, None, rng)
                    values.append(snap(net, school.lon, school.lat))
                else:
                    values.append(random_location(net, rng))
            env[parameter.name] = tuple(values)
        elif parameter.type == "array_zones":
            env[parameter.name] = tuple(env[name] for name in parameter.value)
        elif parameter.type == "array_primitives":
            env[parameter.name] = tuple(parameter.value)
        else:
            env[parameter.name] = parameter.value
    return env


class RequestGenerator:
    """
    Generates the requests of one instance.

    Attributes:
        vcfg: Validated configuration
        bundle: Network bundle (drive network with travel times)
        context: Evaluation context for dtt() and stops()
        order: Attribute generation order
        restarts: Requests discarded so far in this instance
    """

    def __init__(self, vcfg: ValidatedConfig, bundle: NetworkBundle, context: Optional[NetworkContext] = None):
        self.vcfg = vcfg
        self.cfg = vcfg.config
        self.bundle = bundle
        self.context = context or NetworkContext(bundle)
        self.order = build_attribute_order(vcfg)
        self.attributes = {a.name: a for a in self.cfg.attributes}
        self.restarts = 0

        # a method_pois pair is placed together, when its first attribute comes up
        self.pairs = {m.locations[0]: m for m in self.cfg.method_pois}
        self.paired = {m.locations[1] for m in self.cfg.method_pois}

    # ------------------------------------------------------------------ drawing

    def _choose(self, parameter: str, attribute: AttributeSpec, env: Mapping[str, Any], rng: RngStream) -> Any:
        weights = list(attribute.weights) if attribute.weights is not None else None
        return weighted_choice(env[parameter], weights, rng)

    def _draw_location(self, attribute: AttributeSpec, env: Mapping[str, Any], rng: RngStream) -> Location:
        net = self.bundle.drive
        if attribute.subset_locations == BUS_STATIONS:
            stations = self.bundle.stations
            if stations is None or not len(stations):
                raise GenerationError(f"attribute '{attribute.name}' draws from bus_stations but there are none")
            weights = list(attribute.weights) if attribute.weights is not None else None
            return weighted_choice(list(stations), weights, rng).location()
        if attribute.subset_locations is not None:
            return self._choose(attribute.subset_locations, attribute, env, rng)
        if attribute.subset_zones is not None:
            zone: ResolvedPlace = self._choose(attribute.subset_zones, attribute, env, rng)
            return location_in_zone(zone, net, rng)
        return random_location(net, rng)

    def draw(self, attribute: AttributeSpec, env: Mapping[str, Any], rng: RngStream) -> Value:
        """One value for an attribute (method_pois pairs excluded)."""
        if attribute.type == "location":
            return self._draw_location(attribute, env, rng)
        if attribute.name in self.vcfg.expressions:
            value = evaluate(self.vcfg.expressions[attribute.name], env, self.context)
        elif attribute.subset_primitives is not None:
            value = self._choose(attribute.subset_primitives, attribute, env, rng)
        else:
            value = sample_pdf(attribute.pdf, rng)
        return coerce_to_type(value, attribute.type, attribute.name)

    def redrawable(self, name: str, fixed: Mapping[str, Value]) -> bool:
        """Whether drawing the attribute again can give a different value."""
        if name in fixed:
            return False
        return name in self.pairs or name not in self.vcfg.expressions

    # -------------------------------------------------------------- constraints

    def violations(self, names: Sequence[str], env: Mapping[str, Any]) -> List[str]:
        """Constraint texts of `names` that evaluate false under env."""
        violated = []
        for name in names:
            for text, tree in self.vcfg.constraints.get(name, ()):
                if not evaluate(tree, env, self.context):
                    violated.append(text)
        return violated

    # ----------------------------------------------------------------- requests

    def _set(self, name: str, record: RequestRecord, env: Mapping[str, Any], rng: RngStream, fixed) -> List[str]:
        if name in fixed:
            record[name] = fixed[name]
            return [name]
        if name in self.pairs:
            method = self.pairs[name]
            first, second = apply_poi_method(method, self.bundle.pois, self.bundle.drive, rng)
            record[method.locations[0]], record[method.locations[1]] = first, second
            return list(method.locations)
        record[name] = self.draw(self.attributes[name], env, rng)
        return [name]

    def _attempt(
        self, base_env: Mapping[str, Any], rng: RngStream, fixed: Mapping[str, Value]
    ) -> Tuple[Optional[RequestRecord], List[str]]:
        record: RequestRecord = {}
        env = ChainMap(record, base_env)
        for name in self.order:
            if name in self.paired:
                continue
            for attempt in range(MAX_ATTRIBUTE_RETRIES + 1):
                try:
                    names = self._set(name, record, env, rng, fixed)
                    violated = self.violations(names, env)
                except UnreachableError as e:
                    violated = [f"{name}: {e}"]
                except DivisionByZeroError as e:
                    violated = [f"{name}: {e}"]
                if not violated:
                    break
                if not self.redrawable(name, fixed):
                    return None, violated
            else:
                return None, violated
        return record, []

    def generate_request(
        self, base_env: Mapping[str, Any], rng: RngStream, fixed: Optional[Mapping[str, Value]] = None
    ) -> RequestRecord:
        """
        Generate one request satisfying every constraint.

        Args:
            base_env: Place and parameter values (see parameter_environment)
            rng: Stream to draw from
            fixed: Attribute values decided beforehand (targeted time stamps)

        Returns:
            Record with every attribute, in declaration order

        Raises:
            InfeasibleConfigError: The instance discarded MAX_RECORD_RESTARTS requests
        """
        fixed = fixed or {}
        while True:
            record, violated = self._attempt(base_env, rng, fixed)
            if record is not None:
                return {a.name: record[a.name] for a in self.cfg.attributes}
            self.restarts += 1
            if self.restarts >= MAX_RECORD_RESTARTS:
                raise InfeasibleConfigError(self.restarts, violated)
            if self.restarts % 1000 == 0:
                logger.warning(f"{self.restarts} requests discarded so far; last violated: {', '.join(violated)}")


def generate_request(
    vcfg: ValidatedConfig, bundle: NetworkBundle, rng: RngStream, base_env: Optional[Mapping[str, Any]] = None
) -> RequestRecord:
    """Generate a single request; see RequestGenerator.generate_request."""
    generator = RequestGenerator(vcfg, bundle)
    if base_env is None:
        base_env = parameter_environment(vcfg, bundle, rng)
    return generator.generate_request(base_env, rng)


def check_record(
    vcfg: ValidatedConfig,
    record: Mapping[str, Value],
    base_env: Mapping[str, Any],
    context: Optional[NetworkContext] = None,
) -> List[str]:
    """
    Constraints a finished record violates.

    Args:
        vcfg: Validated configuration
        record: Request with every attribute set
        base_env: Place and parameter values used to generate it
        context: Evaluation context; needed when constraints call dtt() or stops()

    Returns:
        Texts of the violated constraints, empty when the record is sound
    """
    env = ChainMap(dict(record), base_env)
    violated = []
    for attribute in vcfg.config.attributes:
        for text, tree in vcfg.constraints.get(attribute.name, ()):
            if not evaluate(tree, env, context):
                violated.append(text)
    return violated
