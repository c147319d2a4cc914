"""
Command-line interface.

    reqgen net synth|ingest|stations|pois   build a network bundle
    reqgen generate CONFIG                  generate the replicas of a configuration
    reqgen measure INSTANCE                 dynamism, urgency and geographic dispersion
    reqgen similarity A B                   similarity of two instances
    reqgen benchmark TEMPLATE               expand a template over property levels

The network bundle directory defaults to $REQGEN_BUNDLE_DIR; the console log
level to $REQGEN_LOG_LEVEL. Both may be set in a .env file.
"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Tuple, TypeVar

import click
import pandas as pd
from dotenv import load_dotenv

from . import __version__
from .config.parser import load_config, parse_config
from .config.validation import validate_config
from .generator.benchmark import DISPERSION_CLASSES, expand_benchmark
from .generator.context import NetworkContext, prepare_network
from .generator.instance import Instance, generate_replicas, verify_instance
from .generator.writer import read_instance, read_instance_meta, write_instance
from .metrics.dispersion import DEFAULT_NEIGHBORS, DEFAULT_TIME_THRESHOLD
from .metrics.report import MetricRoles, format_report, measure_instance, report_to_frame, truncate_2dp
from .network.bundle import NetworkBundle, load_bundle, save_bundle
from .network.geodesy import Coordinate
from .network.graph import DEFAULT_MAXSPEED, DRIVE, WALK
from .network.loaders import load_network, synth_grid_network
from .network.pois import DEFAULT_CELL_SIZE, build_poi_index, load_pois
from .network.stations import dedupe_stations, load_stations
from .similarity.matching import DEFAULT_THRESHOLD, SimilarityThresholds, instance_similarity
from .utils.exceptions import ConfigSyntaxError, ReqgenError
from .utils.logging import configure_for_environment

logger = logging.getLogger(__name__)

BUNDLE_ENV = "REQGEN_BUNDLE_DIR"
LOG_LEVEL_ENV = "REQGEN_LOG_LEVEL"

T = TypeVar("T")


def reports_errors(func: Callable) -> Callable:
    """Turn tool errors into one logged line and exit status 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ReqgenError, FileNotFoundError) as e:
            logger.error(str(e))
            sys.exit(1)

    return wrapper


def bundle_option(func: Callable) -> Callable:
    return click.option(
        "--bundle",
        "bundle_dir",
        envvar=BUNDLE_ENV,
        required=True,
        type=click.Path(file_okay=False, path_type=Path),
        help=f"Network bundle directory (default: ${BUNDLE_ENV}).",
    )(func)


def role_options(func: Callable) -> Callable:
    """Attribute-name overrides for the per-request symbols the measures read."""
    defaults = MetricRoles()
    for field_name, flag in reversed(
        [
            ("time_stamp", "--ts"),
            ("earliest_departure", "--earliest-departure"),
            ("latest_departure", "--latest-departure"),
            ("latest_arrival", "--latest-arrival"),
            ("origin", "--origin"),
            ("destination", "--destination"),
            ("stops_origin", "--stops-origin"),
            ("stops_destination", "--stops-destination"),
        ]
    ):
        func = click.option(
            flag,
            f"role_{field_name}",
            default=getattr(defaults, field_name),
            show_default=True,
            help=f"Attribute holding the {field_name.replace('_', ' ')}.",
        )(func)
    return func


def _roles(kwargs: dict) -> MetricRoles:
    return MetricRoles(**{key[len("role_"):]: kwargs.pop(key) for key in list(kwargs) if key.startswith("role_")})


def _split(value: Optional[str], cast: Callable[[str], T]) -> Optional[List[T]]:
    """Comma-separated option values; None when the option was not given."""
    if value is None:
        return None
    return [cast(item.strip()) for item in value.split(",") if item.strip()]


def _urgency_level(text: str) -> Tuple[float, float]:
    mean, _, std = text.partition(":")
    try:
        return float(mean), float(std or 0.0)
    except ValueError:
        raise click.BadParameter(f"expected MEAN:STD, got {text!r}", param_hint="--urgency")


def _period(text: Optional[str]) -> Optional[Tuple[float, float]]:
    if text is None:
        return None
    try:
        start, end = _split(text, float)
    except ValueError:
        raise click.BadParameter(f"expected START,END, got {text!r}", param_hint="--period")
    if end <= start:
        raise click.BadParameter(f"period end {end} is not after its start {start}", param_hint="--period")
    return start, end


def _load_existing(bundle_dir: Path) -> Optional[NetworkBundle]:
    try:
        return load_bundle(bundle_dir)
    except FileNotFoundError:
        return None


def _context_for(bundle: NetworkBundle, meta: dict) -> NetworkContext:
    prepare_network(bundle, float(meta.get("max_speed_factor", 1.0)), meta.get("equal_speed"))
    return NetworkContext(bundle)


def _summary(instance: Instance, context: NetworkContext) -> str:
    parts = [f"{instance.name}: {len(instance.requests)} requests"]
    try:
        metrics = measure_instance(instance.requests, context.travel, instance.period)
    except ReqgenError as e:
        logger.warning(f"{instance.name} not measured: {e}")
        return parts[0]
    if metrics.dynamism is not None:
        parts.append(f"rho={truncate_2dp(metrics.dynamism.rho)}")
    if metrics.urgency is not None:
        parts.append(f"urgency={truncate_2dp(metrics.urgency.mean)}/{truncate_2dp(metrics.urgency.std)}")
    if metrics.dispersion is not None:
        parts.append(f"gd={truncate_2dp(metrics.dispersion.gd)}")
    return ", ".join(parts)


@click.group()
@click.version_option(__version__, prog_name="reqgen")
@click.option("--log-level", envvar=LOG_LEVEL_ENV, default=None, help=f"Console log level (default: ${LOG_LEVEL_ENV}).")
def cli(log_level: Optional[str]) -> None:
    """Generate and analyze on-demand transportation instances."""
    configure_for_environment(level=log_level.upper() if log_level else None)


# ----------------------------------------------------------------------- net


@cli.group()
def net() -> None:
    """Build the network bundle generation reads."""


@net.command("synth")
@bundle_option
@click.option("--rows", type=click.IntRange(min=2), required=True)
@click.option("--cols", type=click.IntRange(min=2), required=True)
@click.option("--spacing", type=float, required=True, help="Distance between neighbouring nodes (m).")
@click.option("--maxspeed", type=float, default=DEFAULT_MAXSPEED[DRIVE], show_default=True, help="Arc speed (m/s).")
@click.option("--origin-lon", type=float, default=0.0, show_default=True)
@click.option("--origin-lat", type=float, default=0.0, show_default=True)
@click.option("--walk/--no-walk", default=True, show_default=True, help="Add a walk network on the same grid.")
@click.option("--name", default="grid", show_default=True)
@reports_errors
def net_synth(bundle_dir, rows, cols, spacing, maxspeed, origin_lon, origin_lat, walk, name):
    """Synthesize a grid network."""
    origin = Coordinate(origin_lon, origin_lat)
    drive = synth_grid_network(rows, cols, spacing, maxspeed, origin=origin, kind=DRIVE)
    walk_net = None
    if walk:
        walk_net = synth_grid_network(rows, cols, spacing, DEFAULT_MAXSPEED[WALK], origin=origin, kind=WALK)
    save_bundle(bundle_dir, NetworkBundle(drive=drive, walk=walk_net, meta={"name": name}))
    click.echo(f"{name}: {drive.number_of_nodes} nodes, {drive.number_of_arcs} arcs -> {bundle_dir}")


@net.command("ingest")
@bundle_option
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--kind", type=click.Choice([DRIVE, WALK]), default=DRIVE, show_default=True)
@click.option("--edges", "edges_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--name", default=None, help="Bundle name (default: the file stem).")
@reports_errors
def net_ingest(bundle_dir, path, kind, edges_path, name):
    """Load a GraphML or nodes/edges CSV network into the bundle."""
    network = load_network(path, kind=kind, edges_path=edges_path)
    existing = _load_existing(bundle_dir)

    if kind == WALK:
        if existing is None:
            raise click.UsageError("ingest the drive network before the walk network")
        existing.walk = network
        if existing.stations is not None:
            existing.stations = dedupe_stations(existing.stations, existing.drive, network)
        bundle = existing
    else:
        bundle = NetworkBundle(drive=network, meta={"name": name or path.stem})
        if existing is not None:
            bundle.walk = existing.walk
            if existing.stations is not None:
                bundle.stations = dedupe_stations(existing.stations, network, existing.walk)
            if existing.pois is not None:
                bundle.pois = build_poi_index(existing.pois.to_frame(), network.bounds, existing.pois.cell_size)
    if name:
        bundle.meta["name"] = name

    save_bundle(bundle_dir, bundle)
    click.echo(f"{kind}: {network.number_of_nodes} nodes, {network.number_of_arcs} arcs -> {bundle_dir}")


@net.command("stations")
@bundle_option
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--sample-size", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@reports_errors
def net_stations(bundle_dir, path, sample_size, seed):
    """Add a station CSV (station_id,lon,lat), removing repeated and isolated stations."""
    bundle = load_bundle(bundle_dir)
    raw = load_stations(path)
    bundle.stations = dedupe_stations(raw, bundle.drive, bundle.walk, sample_size=sample_size, seed=seed)
    save_bundle(bundle_dir, bundle)
    click.echo(f"stations: {len(bundle.stations)} of {len(raw)} kept -> {bundle_dir}")


@net.command("pois")
@bundle_option
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--cell-size", type=float, default=DEFAULT_CELL_SIZE, show_default=True, help="Grid cell side (m).")
@reports_errors
def net_pois(bundle_dir, path, cell_size):
    """Add a POI CSV (lon,lat), counted over a grid of the drive network's bounds."""
    if cell_size <= 0:
        raise click.BadParameter("must be positive", param_hint="--cell-size")
    bundle = load_bundle(bundle_dir)
    bundle.pois = load_pois(path, bundle.drive.bounds, cell_size)
    save_bundle(bundle_dir, bundle)
    click.echo(f"pois: {bundle.pois.total} in {bundle.pois.number_of_cells} cells -> {bundle_dir}")


# ------------------------------------------------------------------ generate


def _generate_into(config, bundle: NetworkBundle, out: Path, jobs: int, verify: bool, progress: bool) -> None:
    vcfg = validate_config(config, bundle.drive)
    instances = generate_replicas(vcfg, bundle, n_jobs=jobs, progress=progress)
    context = NetworkContext(bundle)
    for instance in instances:
        write_instance(instance, config, out)
        if verify:
            problems = verify_instance(vcfg, instance, context)
            if problems:
                for index, violated in sorted(problems.items()):
                    logger.error(f"{instance.name} request {index} violates: {'; '.join(violated)}")
                sys.exit(1)
        click.echo(_summary(instance, context))


@cli.command()
@bundle_option
@click.argument("config_path", metavar="CONFIG", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("instances"), show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True, help="Replicas generated in parallel (-1: all cores).")
@click.option("--verify", is_flag=True, help="Re-check every constraint on the written requests.")
@click.option("--no-progress", is_flag=True, help="Hide the progress bar.")
@reports_errors
def generate(bundle_dir, config_path, out, jobs, verify, no_progress):
    """Generate the replicas of a configuration file."""
    config = load_config(config_path)
    bundle = load_bundle(bundle_dir)
    _generate_into(config, bundle, out, jobs, verify, not no_progress)


# --------------------------------------------------------------- measurement


@cli.command()
@bundle_option
@click.argument("instance_path", metavar="INSTANCE", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--th-s", type=float, default=DEFAULT_TIME_THRESHOLD, show_default=True, help="Time threshold (s).")
@click.option("--n", "neighbors", type=click.IntRange(min=0), default=DEFAULT_NEIGHBORS, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), help="Also write key,value CSV.")
@click.option(
    "--period",
    "period_text",
    metavar="START,END",
    help="Planning period in seconds. Defaults to the instance metadata, else the span of the time stamps.",
)
@role_options
@reports_errors
def measure(bundle_dir, instance_path, th_s, neighbors, csv_path, period_text, **kwargs):
    """Measure dynamism, urgency and geographic dispersion of an instance CSV."""
    roles = _roles(kwargs)
    period = _period(period_text)
    bundle = load_bundle(bundle_dir)
    meta = read_instance_meta(instance_path)
    context = _context_for(bundle, meta)
    records = read_instance(instance_path, bundle)
    if period is None and meta.get("planning_period"):
        period = tuple(meta["planning_period"])

    metrics = measure_instance(records, context.travel, period, roles=roles, th_s=th_s, n=neighbors)
    click.echo(format_report(metrics))
    if csv_path is not None:
        report_to_frame(metrics).to_csv(csv_path, index=False)


@cli.command()
@bundle_option
@click.argument("first_path", metavar="A", type=click.Path(dir_okay=False, path_type=Path))
@click.argument("second_path", metavar="B", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--th-tt", type=click.FloatRange(min=0, min_open=True), default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--th-ts", type=click.FloatRange(min=0, min_open=True), default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--th-e", type=click.FloatRange(min=0, min_open=True), default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--matching", "matching_path", type=click.Path(dir_okay=False, path_type=Path), help="Write i,j,xi CSV.")
@role_options
@reports_errors
def similarity(bundle_dir, first_path, second_path, th_tt, th_ts, th_e, matching_path, **kwargs):
    """Similarity of two instances with the same number of requests."""
    roles = _roles(kwargs)
    bundle = load_bundle(bundle_dir)
    context = _context_for(bundle, read_instance_meta(first_path))
    first = read_instance(first_path, bundle)
    second = read_instance(second_path, bundle)

    result = instance_similarity(first, second, SimilarityThresholds(th_tt, th_ts, th_e), context.travel, roles)
    click.echo(f"omega: {truncate_2dp(result.omega)}")
    for i, j in result.matching:
        click.echo(f"{i} -> {j}: {truncate_2dp(result.xi_matrix[i, j])}")
    if matching_path is not None:
        frame = pd.DataFrame(
            [(i, j, float(result.xi_matrix[i, j])) for i, j in result.matching], columns=["i", "j", "xi"]
        )
        frame.to_csv(matching_path, index=False)


# ----------------------------------------------------------------- benchmark


@cli.command()
@bundle_option
@click.argument("template_path", metavar="TEMPLATE", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("benchmark"), show_default=True)
@click.option("--sizes", help="Comma-separated request counts.")
@click.option("--dynamism", help="Comma-separated dynamism targets in [0, 1].")
@click.option("--urgency", help="Comma-separated MEAN:STD reaction times (s).")
@click.option("--gd", help=f"Comma-separated dispersion classes: {', '.join(DISPERSION_CLASSES)}.")
@click.option("--ts", "time_stamp", default=MetricRoles().time_stamp, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--no-progress", is_flag=True)
@reports_errors
def benchmark(bundle_dir, template_path, out, sizes, dynamism, urgency, gd, time_stamp, jobs, no_progress):
    """Generate one instance group per combination of property levels."""
    with open(template_path, "r", encoding="utf-8") as f:
        try:
            template = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigSyntaxError(e.msg, e.lineno, e.colno) from e
    groups = expand_benchmark(
        template,
        sizes=_split(sizes, int),
        dynamism=_split(dynamism, float),
        urgency=_split(urgency, _urgency_level),
        dispersion=_split(gd, str),
        time_stamp=time_stamp,
    )
    if not groups:
        logger.info("Empty benchmark grid; nothing generated")
        return

    bundle = load_bundle(bundle_dir)
    for group in groups:
        directory = out / group.name
        directory.mkdir(parents=True, exist_ok=True)
        text = json.dumps(group.config, indent=2, sort_keys=True)
        (directory / "config.json").write_text(text + "\n", encoding="utf-8")
        click.echo(f"[{group.name}]")
        _generate_into(parse_config(text), bundle, directory, jobs, False, not no_progress)


def main() -> None:
    load_dotenv()
    cli(prog_name="reqgen")


if __name__ == "__main__":
    main()
