"""
Instance configuration: typed model, JSON parser, unit conversion and
validation against a road network.
"""

from .models import (
    AttributeSpec,
    InstanceConfig,
    MobilityMethodSpec,
    ParameterSpec,
    PdfSpec,
    PlaceSpec,
    ResolvedPlace,
    ValidatedConfig,
)
from .parser import config_hash, config_to_dict, load_config, parse_config, serialize_config
from .units import canonicalize_units
from .validation import attribute_dependencies, validate_config

__all__ = [
    "AttributeSpec",
    "InstanceConfig",
    "MobilityMethodSpec",
    "ParameterSpec",
    "PdfSpec",
    "PlaceSpec",
    "ResolvedPlace",
    "ValidatedConfig",
    "attribute_dependencies",
    "canonicalize_units",
    "config_hash",
    "config_to_dict",
    "load_config",
    "parse_config",
    "serialize_config",
    "validate_config",
]
