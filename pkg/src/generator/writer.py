"""
Instance files.

For an instance named N the generator writes:

    N.csv                 one row per request, attributes with output_csv
    N_tt_matrix.csv       travel times between the travel_time_matrix locations
    N_locations.graphml   the same locations as a graph weighted by travel time
    N_meta.json           seed, replica, configuration hash, planning period,
                          static requests, dynamism targeting outcome

A location attribute takes three columns (<name>_lon, <name>_lat,
<name>_node); arrays are written as JSON lists.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import networkx as nx
import pandas as pd

from ..config.models import InstanceConfig
from ..expr.values import Location
from ..network.bundle import NetworkBundle
from .instance import Instance

logger = logging.getLogger(__name__)

MATRIX_SUFFIX = "_tt_matrix.csv"
GRAPH_SUFFIX = "_locations.graphml"
META_SUFFIX = "_meta.json"
LOCATION_SUFFIXES = ("_lon", "_lat", "_node")


def request_frame(instance: Instance, cfg: InstanceConfig) -> pd.DataFrame:
    """Requests as a table; location attributes spread over three columns."""
    columns: List[str] = []
    for attribute in cfg.attributes:
        if not attribute.output_csv:
            continue
        if attribute.type == "location":
            columns.extend(attribute.name + suffix for suffix in LOCATION_SUFFIXES)
        else:
            columns.append(attribute.name)

    rows = []
    for record in instance.requests:
        row: Dict[str, Any] = {}
        for attribute in cfg.attributes:
            if not attribute.output_csv:
                continue
            value = record[attribute.name]
            if isinstance(value, Location):
                row[attribute.name + "_lon"] = value.lon
                row[attribute.name + "_lat"] = value.lat
                row[attribute.name + "_node"] = value.node
            elif isinstance(value, frozenset):
                row[attribute.name] = json.dumps(sorted(value))
            elif isinstance(value, tuple):
                row[attribute.name] = json.dumps(list(value))
            else:
                row[attribute.name] = value
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def matrix_frame(instance: Instance) -> pd.DataFrame:
    return pd.DataFrame(instance.matrix, index=instance.matrix_nodes, columns=instance.matrix_nodes)


def location_graph(instance: Instance) -> nx.DiGraph:
    """Matrix locations as nodes, one arc per reachable ordered pair weighted by travel time."""
    graph = nx.DiGraph(name=instance.name)
    for node in instance.matrix_nodes:
        location = instance.locations[node]
        graph.add_node(node, x=location.lon, y=location.lat)
    for i, u in enumerate(instance.matrix_nodes):
        for j, v in enumerate(instance.matrix_nodes):
            if i != j and not math.isnan(instance.matrix[i, j]):
                graph.add_edge(u, v, travel_time=float(instance.matrix[i, j]))
    return graph


def write_instance(instance: Instance, cfg: InstanceConfig, directory: Union[str, Path]) -> List[Path]:
    """
    Write an instance's files, replacing files of the same name.

    Args:
        instance: Generated instance
        cfg: Its configuration (column selection and order)
        directory: Output directory, created when missing

    Returns:
        Paths of the written files
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    path = directory / f"{instance.name}.csv"
    request_frame(instance, cfg).to_csv(path, index=False)
    written.append(path)

    if instance.matrix is not None:
        path = directory / f"{instance.name}{MATRIX_SUFFIX}"
        matrix_frame(instance).to_csv(path, index_label="node", na_rep="")
        written.append(path)

        path = directory / f"{instance.name}{GRAPH_SUFFIX}"
        nx.write_graphml(location_graph(instance), path)
        written.append(path)

    path = directory / f"{instance.name}{META_SUFFIX}"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(instance.meta, f, indent=2, sort_keys=True)
    written.append(path)

    logger.info(f"Wrote {instance.name} ({len(instance.requests)} requests) to {directory}")
    return written


def _parse_cell(value: Any) -> Any:
    if isinstance(value, str) and value.startswith("["):
        try:
            return tuple(json.loads(value))
        except json.JSONDecodeError:
            return value
    if hasattr(value, "item"):
        return value.item()
    return value


def _location_names(columns: List[str]) -> List[str]:
    names = []
    for column in columns:
        if column.endswith("_node"):
            name = column[: -len("_node")]
            if f"{name}_lon" in columns and f"{name}_lat" in columns:
                names.append(name)
    return names


def read_instance(path: Union[str, Path], bundle: Optional[NetworkBundle] = None) -> List[Dict[str, Any]]:
    """
    Read the requests of an instance CSV back as attribute dictionaries.

    Location columns are recombined into Location values; with a bundle the
    coordinates come from the drive network node, otherwise from the file.
    JSON list cells become tuples.

    Raises:
        FileNotFoundError: The file does not exist
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Instance file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        return []

    locations = _location_names(list(frame.columns))
    located_columns = {name + suffix for name in locations for suffix in LOCATION_SUFFIXES}

    records = []
    for row in frame.to_dict(orient="records"):
        record: Dict[str, Any] = {}
        for column in frame.columns:
            if column in located_columns:
                continue
            record[column] = _parse_cell(row[column])
        for name in locations:
            node = int(row[name + "_node"])
            if bundle is not None:
                record[name] = bundle.drive.location(node)
            else:
                record[name] = Location(node, float(row[name + "_lon"]), float(row[name + "_lat"]))
        records.append(record)
    logger.debug(f"Read {len(records)} requests from {path}")
    return records


def read_instance_meta(path: Union[str, Path]) -> Dict[str, Any]:
    """Sidecar metadata of an instance CSV, or {} when there is none."""
    path = Path(path)
    meta_path = path.with_name(path.stem + META_SUFFIX)
    if not meta_path.exists():
        return {}
    with open(meta_path, "r", encoding="utf-8") as f:
        return json.load(f)
