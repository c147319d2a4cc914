"""
Instance generation: attribute ordering, request synthesis, placement,
announcement times, replicas and instance files.
"""

from .benchmark import DISPERSION_CLASSES, BenchmarkGroup, expand_benchmark, group_name
from .context import NetworkContext, prepare_network
from .instance import Instance, generate_instance, generate_replicas, instance_name, verify_instance
from .order import build_attribute_order, topological_order
from .placement import apply_poi_method, location_in_zone, random_location
from .requests import (
    MAX_ATTRIBUTE_RETRIES,
    MAX_RECORD_RESTARTS,
    RequestGenerator,
    check_record,
    generate_request,
    parameter_environment,
)
from .timing import TimeStampPlan, apply_static_probability, assign_time_stamps, planning_period
from .writer import read_instance, read_instance_meta, write_instance

__all__ = [
    "BenchmarkGroup",
    "DISPERSION_CLASSES",
    "Instance",
    "MAX_ATTRIBUTE_RETRIES",
    "MAX_RECORD_RESTARTS",
    "NetworkContext",
    "RequestGenerator",
    "TimeStampPlan",
    "apply_poi_method",
    "apply_static_probability",
    "assign_time_stamps",
    "build_attribute_order",
    "check_record",
    "generate_instance",
    "expand_benchmark",
    "generate_replicas",
    "generate_request",
    "group_name",
    "instance_name",
    "location_in_zone",
    "parameter_environment",
    "planning_period",
    "prepare_network",
    "random_location",
    "read_instance",
    "read_instance_meta",
    "topological_order",
    "verify_instance",
    "write_instance",
]
