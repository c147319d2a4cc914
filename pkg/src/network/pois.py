"""
Points-of-interest grid.

The network bounding box is tiled with square cells of a given size; each
cell counts the POIs falling inside it. Cells are the zones the POI mobility
method picks from, with probability proportional to their count.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from ..config.models import PlaceSpec, ResolvedPlace
from ..utils.exceptions import MissingAttributeError, NetworkParseError
from .geodesy import EARTH_RADIUS_M
from .graph import Bounds

logger = logging.getLogger(__name__)

POI_COLUMNS = ("lon", "lat")
DEFAULT_CELL_SIZE = 1000.0


@dataclass(frozen=True)
class PoiCell:
    index: int
    row: int
    col: int
    center_lon: float
    center_lat: float
    count: int


class PoiIndex:
    """
    Grid of POI counts over a bounding box.

    Attributes:
        bounds: Box tiled by the grid (cells on the last row/column may overhang it)
        cell_size: Cell side in meters, measured at the box's central latitude
        counts: (rows, cols) integer array of POIs per cell
    """

    def __init__(self, bounds: Bounds, cell_size: float, lons: np.ndarray, lats: np.ndarray):
        if cell_size <= 0:
            raise ValueError(f"cell size must be positive, got {cell_size}")
        self.bounds = bounds
        self.cell_size = float(cell_size)

        mid_lat = (bounds.min_lat + bounds.max_lat) / 2.0
        self.dlat = math.degrees(cell_size / EARTH_RADIUS_M)
        self.dlon = math.degrees(cell_size / (EARTH_RADIUS_M * math.cos(math.radians(mid_lat))))
        self.n_cols = max(1, math.ceil((bounds.max_lon - bounds.min_lon) / self.dlon))
        self.n_rows = max(1, math.ceil((bounds.max_lat - bounds.min_lat) / self.dlat))

        lons = np.asarray(lons, dtype=float)
        lats = np.asarray(lats, dtype=float)
        inside = (
            (lons >= bounds.min_lon) & (lons <= bounds.max_lon) & (lats >= bounds.min_lat) & (lats <= bounds.max_lat)
        )
        dropped = int((~inside).sum())
        if dropped:
            logger.warning(f"{dropped} POIs outside the network bounds were ignored")
        self.lons, self.lats = lons[inside], lats[inside]

        cols = np.clip(((self.lons - bounds.min_lon) / self.dlon).astype(int), 0, self.n_cols - 1)
        rows = np.clip(((self.lats - bounds.min_lat) / self.dlat).astype(int), 0, self.n_rows - 1)
        self.counts = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        np.add.at(self.counts, (rows, cols), 1)

    def __repr__(self) -> str:
        return f"PoiIndex({self.n_rows}x{self.n_cols} cells of {self.cell_size:g} m, {self.total} POIs)"

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def number_of_cells(self) -> int:
        return self.n_rows * self.n_cols

    def weights(self) -> List[int]:
        """POI count of every cell, in cell-index order (row-major)."""
        return [int(c) for c in self.counts.ravel()]

    def cell(self, index: int) -> PoiCell:
        row, col = divmod(index, self.n_cols)
        return PoiCell(
            index=index,
            row=row,
            col=col,
            center_lon=self.bounds.min_lon + (col + 0.5) * self.dlon,
            center_lat=self.bounds.min_lat + (row + 0.5) * self.dlat,
            count=int(self.counts[row, col]),
        )

    def cells(self) -> List[PoiCell]:
        return [self.cell(i) for i in range(self.number_of_cells)]

    def zone(self, index: int) -> ResolvedPlace:
        """Cell as a rectangle zone whose extent in meters matches its degree extent."""
        cell = self.cell(index)
        length_lon = math.radians(self.dlon) * EARTH_RADIUS_M * math.cos(math.radians(cell.center_lat))
        length_lat = math.radians(self.dlat) * EARTH_RADIUS_M
        spec = PlaceSpec(
            name=f"poi_cell_{index}",
            kind="zone",
            lon=cell.center_lon,
            lat=cell.center_lat,
            length_lon=length_lon,
            length_lat=length_lat,
        )
        return ResolvedPlace(spec=spec, lon=cell.center_lon, lat=cell.center_lat)

    def to_frame(self) -> pd.DataFrame:
        """POIs kept by the index, in the CSV layout load_pois reads."""
        return pd.DataFrame({"lon": self.lons, "lat": self.lats})


def build_poi_index(frame: pd.DataFrame, bounds: Bounds, cell_size: float = DEFAULT_CELL_SIZE) -> PoiIndex:
    for column in POI_COLUMNS:
        if column not in frame.columns:
            raise MissingAttributeError(column, "POI file")
    frame = frame.dropna(subset=list(POI_COLUMNS))
    return PoiIndex(bounds, cell_size, frame["lon"].to_numpy(), frame["lat"].to_numpy())


def load_pois(path: Union[str, Path], bounds: Bounds, cell_size: float = DEFAULT_CELL_SIZE) -> PoiIndex:
    """
    Read a POI CSV (lon,lat) and count it over a grid covering `bounds`.

    Args:
        path: POI file
        bounds: Network bounding box to tile
        cell_size: Cell side in meters

    Returns:
        PoiIndex whose counts sum to the number of in-bounds POIs
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"POI file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(columns=list(POI_COLUMNS))
    except pd.errors.ParserError as e:
        raise NetworkParseError(f"Cannot parse {path}: {e}") from e
    index = build_poi_index(frame, bounds, cell_size)
    logger.info(f"Loaded {index.total} POIs from {path} into {index.number_of_cells} cells")
    return index
