"""
Instances and replicas.

Replica k (numbered from 1) of a configuration draws from the random stream
(seed, k), so replicas differ from each other but every run of the same
configuration on the same network reproduces them exactly. Within an
instance the stream is consumed in a fixed order: padded location
parameters, targeted time stamps, then requests one by one.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ..config.models import BUS_STATIONS, ValidatedConfig
from ..config.parser import config_hash
from ..expr.values import Location, coerce_to_type
from ..network.bundle import NetworkBundle
from ..network.routing import travel_time_matrix
from ..sampling.rng import RngStream
from ..utils.logging import log_function_call
from .context import NetworkContext, prepare_network
from .requests import RequestGenerator, RequestRecord, check_record, parameter_environment
from .timing import TimeStampPlan, apply_static_probability, assign_time_stamps, planning_period

logger = logging.getLogger(__name__)


@dataclass
class Instance:
    """
    One generated instance.

    Attributes:
        name: File stem, e.g. "Chicago,Illinois_DARP_500_1"
        replica: Replica number (from 1)
        requests: Records in generation order
        period: Planning period (ts_min, ts_max); None when the configuration declares none
        matrix_nodes: Drive nodes labelling the travel-time matrix rows and columns
        matrix: Travel times between matrix_nodes, NaN where unreachable
        base_env: Place and parameter values the requests were generated with
        static: Original time stamps of requests made static, by request index
        meta: Seed, configuration hash and dynamism targeting outcome
    """

    name: str
    replica: int
    requests: List[RequestRecord] = field(default_factory=list)
    period: Optional[Tuple[float, float]] = None
    matrix_nodes: List[int] = field(default_factory=list)
    matrix: Optional[np.ndarray] = None
    locations: Dict[int, Location] = field(default_factory=dict)
    base_env: Dict[str, Any] = field(default_factory=dict)
    static: Dict[int, Any] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)


def instance_name(vcfg: ValidatedConfig, replica: int) -> str:
    """File stem: the instance_filename item values and the replica number, joined by '_'."""
    cfg = vcfg.config
    parts = ["".join(str(cfg.item_value(item)).split()) for item in cfg.instance_filename]
    return "_".join(parts + [str(replica)])


def _matrix_locations(
    vcfg: ValidatedConfig, bundle: NetworkBundle, requests: List[RequestRecord], base_env: Dict[str, Any]
) -> List[Location]:
    """Distinct locations named in travel_time_matrix, in first-seen order."""
    cfg = vcfg.config
    found: Dict[int, Location] = {}

    def add(value: Any) -> None:
        if isinstance(value, Location):
            found.setdefault(value.node, value)
        elif isinstance(value, tuple):
            for item in value:
                add(item)

    for name in cfg.travel_time_matrix or ():
        if name == BUS_STATIONS:
            if bundle.stations is not None:
                for station in bundle.stations:
                    add(station.location())
        elif cfg.attribute(name) is not None:
            for record in requests:
                add(record[name])
        else:
            add(base_env.get(name))
    return list(found.values())


def generate_instance(
    vcfg: ValidatedConfig,
    bundle: NetworkBundle,
    replica: int = 1,
    context: Optional[NetworkContext] = None,
) -> Instance:
    """
    Generate one replica of a configuration.

    Args:
        vcfg: Validated configuration
        bundle: Network bundle; its drive network gets the configured travel times
        replica: Replica number, also the random stream index
        context: Shared evaluation context (memoized station queries)

    Returns:
        Instance with its requests, period and travel-time matrix

    Raises:
        InfeasibleConfigError: Too many requests discarded for violated constraints
    """
    cfg = vcfg.config
    prepare_network(bundle, cfg.max_speed_factor, cfg.equal_speed)
    rng = RngStream(cfg.seed, replica)
    generator = RequestGenerator(vcfg, bundle, context)
    base_env = parameter_environment(vcfg, bundle, rng)

    period = planning_period(cfg)
    ts_attribute = cfg.timestamp_attribute
    plan = TimeStampPlan()
    if ts_attribute is not None and ts_attribute.dynamism is not None:
        plan = assign_time_stamps(
            cfg.requests, period, ts_attribute.dynamism, rng, integer=ts_attribute.type == "integer"
        )
        if ts_attribute.type == "integer":
            plan.timestamps = [int(t) for t in plan.timestamps]

    instance = Instance(name=instance_name(vcfg, replica), replica=replica, period=period, base_env=base_env)
    for index in range(cfg.requests):
        fixed = {ts_attribute.name: plan.timestamps[index]} if plan.timestamps else None
        record = generator.generate_request(base_env, rng, fixed)
        if ts_attribute is not None and ts_attribute.static_probability is not None:
            stamp, is_static = apply_static_probability(record[ts_attribute.name], ts_attribute.static_probability, rng)
            if is_static:
                instance.static[index] = record[ts_attribute.name]
                record[ts_attribute.name] = coerce_to_type(stamp, ts_attribute.type, ts_attribute.name)
        instance.requests.append(record)

    if cfg.travel_time_matrix:
        locations = _matrix_locations(vcfg, bundle, instance.requests, base_env)
        instance.matrix_nodes = [loc.node for loc in locations]
        instance.locations = {loc.node: loc for loc in locations}
        instance.matrix = travel_time_matrix(bundle.drive, instance.matrix_nodes)

    instance.meta = {
        "name": instance.name,
        "seed": cfg.seed,
        "replica": replica,
        "config_hash": config_hash(cfg),
        "max_speed_factor": cfg.max_speed_factor,
        "equal_speed": cfg.equal_speed,
        "requests": len(instance.requests),
        "planning_period": list(instance.period) if instance.period is not None else None,
        "static_requests": sorted(instance.static),
        "discarded_requests": generator.restarts,
    }
    if plan.target is not None:
        instance.meta["dynamism_target"] = plan.target
        instance.meta["dynamism_achieved"] = plan.achieved
        instance.meta["dynamism_target_reached"] = plan.reached

    logger.info(
        f"Generated {instance.name}: {len(instance.requests)} requests, "
        f"{generator.restarts} discarded, {len(instance.static)} static"
    )
    return instance


@log_function_call
def generate_replicas(
    vcfg: ValidatedConfig, bundle: NetworkBundle, n_jobs: int = 1, progress: bool = True
) -> List[Instance]:
    """
    Generate every replica of a configuration.

    Replicas run on joblib worker threads when n_jobs != 1; the result does
    not depend on n_jobs.
    """
    cfg = vcfg.config
    prepare_network(bundle, cfg.max_speed_factor, cfg.equal_speed)
    context = NetworkContext(bundle)
    replicas = range(1, cfg.replicas + 1)
    if n_jobs == 1:
        return [
            generate_instance(vcfg, bundle, k, context)
            for k in tqdm(replicas, desc="Replicas", unit="instance", disable=not progress)
        ]
    return Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(generate_instance)(vcfg, bundle, k, context)
        for k in tqdm(replicas, desc="Replicas", unit="instance", disable=not progress)
    )


def verify_instance(
    vcfg: ValidatedConfig, instance: Instance, context: Optional[NetworkContext] = None
) -> Dict[int, List[str]]:
    """
    Re-check every constraint on every request of an instance.

    Static requests are checked with the time stamp they had before it was
    set to 0.

    Returns:
        Violated constraint texts by request index; empty when the instance is sound
    """
    ts_attribute = vcfg.config.timestamp_attribute
    problems: Dict[int, List[str]] = {}
    for index, record in enumerate(instance.requests):
        if index in instance.static:
            record = dict(record)
            record[ts_attribute.name] = instance.static[index]
        violated = check_record(vcfg, record, instance.base_env, context)
        if violated:
            problems[index] = violated
    return problems
