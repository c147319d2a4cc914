"""
Typed model of an instance configuration.

The model mirrors the JSON items of a configuration file (places, parameters,
attributes, pdf objects, method_pois, travel_time_matrix). Every dimensioned
value is already canonical (s, m, m/s) and the unit fields hold the canonical
tag, which keeps parse -> serialize -> parse stable.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

PDF_FAMILIES = (
    "cauchy",
    "expon",
    "gamma",
    "gilbrat",
    "lognorm",
    "normal",
    "powerlaw",
    "uniform",
    "wald",
)

# Families whose shape parameter travels in `aux`
SHAPED_FAMILIES = ("gamma", "lognorm", "powerlaw")

PLACE_KINDS = ("location", "zone")
PARAMETER_TYPES = (
    "string",
    "integer",
    "real",
    "array_primitives",
    "array_locations",
    "array_zones",
)
ATTRIBUTE_TYPES = ("string", "integer", "real", "location", "array_primitives")
PRIMITIVE_TYPES = ("string", "integer", "real")
LOCS_OPTIONS = ("random", "schools")

# Reserved identifiers with built-in semantics
BUS_STATIONS = "bus_stations"
TIME_STAMP = "time_stamp"
MAX_WALKING = "max_walking"
WALK_SPEED = "walk_speed"
RESERVED_NAMES = (BUS_STATIONS, TIME_STAMP, MAX_WALKING, WALK_SPEED)

# Parameters bounding the planning period, when declared
MIN_PLANNING_PERIOD = "min_planning_period"
MAX_PLANNING_PERIOD = "max_planning_period"

DEFAULT_MAX_WALKING = 600.0
DEFAULT_WALK_SPEED = 1.4


@dataclass(frozen=True)
class PdfSpec:
    """A probability density function declaration (scipy.stats conventions)."""

    family: str
    loc: float
    scale: float
    aux: Optional[float] = None


@dataclass(frozen=True)
class PlaceSpec:
    """A named location or zone from item `places`."""

    name: str
    kind: str
    lon: Optional[float] = None
    lat: Optional[float] = None
    centroid: bool = False
    place_class: Optional[str] = None
    length_lon: Optional[float] = None
    length_lat: Optional[float] = None
    radius: Optional[float] = None
    length_unit: str = "m"

    @property
    def is_rectangle(self) -> bool:
        return self.length_lon is not None and self.length_lat is not None


@dataclass(frozen=True)
class ParameterSpec:
    """A named constant from item `parameters`."""

    name: str
    type: str
    value: Any = None
    time_unit: Optional[str] = None
    length_unit: Optional[str] = None
    speed_unit: Optional[str] = None
    size: Optional[int] = None
    locs: Optional[str] = None


@dataclass(frozen=True)
class AttributeSpec:
    """A per-request attribute from item `attributes`."""

    name: str
    type: str
    time_unit: Optional[str] = None
    length_unit: Optional[str] = None
    speed_unit: Optional[str] = None
    pdf: Optional[PdfSpec] = None
    expression: Optional[str] = None
    constraints: Tuple[str, ...] = ()
    subset_primitives: Optional[str] = None
    subset_locations: Optional[str] = None
    subset_zones: Optional[str] = None
    weights: Optional[Tuple[float, ...]] = None
    output_csv: bool = True
    dynamism: Optional[float] = None
    static_probability: Optional[float] = None

    @property
    def subset_parameter(self) -> Optional[str]:
        return self.subset_primitives or self.subset_locations or self.subset_zones


@dataclass(frozen=True)
class MobilityMethodSpec:
    """POI-weighted origin/destination placement (item `method_pois`)."""

    locations: Tuple[str, str]
    pdf: PdfSpec


@dataclass(frozen=True)
class InstanceConfig:
    """Parsed configuration describing one family of instances."""

    network_source: str
    requests: int
    seed: int = 0
    problem: str = ""
    fixed_lines: bool = False
    max_speed_factor: float = 1.0
    replicas: int = 1
    instance_filename: Tuple[str, ...] = ("network", "problem", "requests")
    places: Tuple[PlaceSpec, ...] = ()
    parameters: Tuple[ParameterSpec, ...] = ()
    attributes: Tuple[AttributeSpec, ...] = ()
    method_pois: Tuple[MobilityMethodSpec, ...] = ()
    travel_time_matrix: Optional[Tuple[str, ...]] = None
    equal_speed: Optional[float] = None

    def attribute(self, name: str) -> Optional[AttributeSpec]:
        return next((a for a in self.attributes if a.name == name), None)

    def parameter(self, name: str) -> Optional[ParameterSpec]:
        return next((p for p in self.parameters if p.name == name), None)

    def place(self, name: str) -> Optional[PlaceSpec]:
        return next((p for p in self.places if p.name == name), None)

    @property
    def timestamp_attribute(self) -> Optional[AttributeSpec]:
        """The attribute carrying the announcement time (dynamism / static probability)."""
        for attribute in self.attributes:
            if attribute.dynamism is not None or attribute.static_probability is not None:
                return attribute
        return self.attribute(TIME_STAMP)

    def item_value(self, item: str) -> Any:
        """Value of a single-primitive top-level item, used for instance filenames."""
        values = {
            "network": self.network_source,
            "seed": self.seed,
            "problem": self.problem,
            "fixed_lines": self.fixed_lines,
            "max_speed_factor": self.max_speed_factor,
            "replicas": self.replicas,
            "requests": self.requests,
        }
        if item in values:
            return values[item]
        parameter = self.parameter(item)
        if parameter is not None and parameter.type in PRIMITIVE_TYPES:
            return parameter.value
        raise KeyError(item)


@dataclass(frozen=True)
class ResolvedPlace:
    """A place with its center resolved against a loaded network."""

    spec: PlaceSpec
    lon: float
    lat: float


@dataclass
class ValidatedConfig:
    """A configuration checked against a network, with resolved place coordinates."""

    config: InstanceConfig
    places: Dict[str, ResolvedPlace] = field(default_factory=dict)
    dependencies: Dict[str, List[str]] = field(default_factory=dict)
    # parsed expression trees, by attribute name
    expressions: Dict[str, Any] = field(default_factory=dict)
    constraints: Dict[str, List[Tuple[str, Any]]] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed
