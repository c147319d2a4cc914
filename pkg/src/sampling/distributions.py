"""
Draws from the nine pdf families and weighted discrete choice.

Families follow scipy.stats parameterizations (loc shifts, scale stretches,
`aux` is the shape parameter):

    uniform   loc + scale * U,            U ~ U[0, 1]
    normal    loc + scale * Z,            Z ~ N(0, 1)
    expon     loc + scale * E,            E ~ Exp(1)
    cauchy    loc + scale * C,            C ~ Cauchy(0, 1)
    gamma     loc + scale * G,            G ~ Gamma(aux)
    lognorm   loc + scale * exp(aux * Z)
    gilbrat   lognorm with aux = 1
    powerlaw  loc + scale * U ** (1 / aux)
    wald      loc + scale * W,            W ~ InverseGaussian(1, 1)

A scale of 0 is a point mass at loc.
"""

import logging
from functools import lru_cache
from typing import Optional, Sequence, TypeVar

import numpy as np
from scipy import stats

from ..config.models import PDF_FAMILIES, SHAPED_FAMILIES, PdfSpec
from ..utils.exceptions import AllZeroWeightsError, InvalidParamsError, LengthMismatchError
from .rng import RngStream

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _check(spec: PdfSpec) -> None:
    if spec.family not in PDF_FAMILIES:
        raise InvalidParamsError(f"Unknown pdf family '{spec.family}'")
    if not np.isfinite(spec.loc) or not np.isfinite(spec.scale) or spec.scale < 0:
        raise InvalidParamsError(f"pdf '{spec.family}' needs finite loc and scale >= 0, got {spec.loc}, {spec.scale}")
    if spec.family in SHAPED_FAMILIES:
        if spec.aux is None or not spec.aux > 0:
            raise InvalidParamsError(f"pdf '{spec.family}' needs a positive aux, got {spec.aux}")
    elif spec.aux is not None:
        raise InvalidParamsError(f"pdf '{spec.family}' takes no aux, got {spec.aux}")


@lru_cache(maxsize=256)
def frozen_distribution(spec: PdfSpec):
    """scipy.stats frozen distribution for a pdf declaration (scale > 0)."""
    _check(spec)
    family, loc, scale = spec.family, spec.loc, spec.scale
    if family == "uniform":
        return stats.uniform(loc=loc, scale=scale)
    if family == "normal":
        return stats.norm(loc=loc, scale=scale)
    if family == "expon":
        return stats.expon(loc=loc, scale=scale)
    if family == "cauchy":
        return stats.cauchy(loc=loc, scale=scale)
    if family == "gamma":
        return stats.gamma(spec.aux, loc=loc, scale=scale)
    if family == "lognorm":
        return stats.lognorm(spec.aux, loc=loc, scale=scale)
    if family == "gilbrat":
        return stats.lognorm(1.0, loc=loc, scale=scale)
    if family == "powerlaw":
        return stats.powerlaw(spec.aux, loc=loc, scale=scale)
    return stats.wald(loc=loc, scale=scale)


def sample_pdf(spec: PdfSpec, rng: RngStream) -> float:
    """
    Draw one value from a pdf declaration.

    Args:
        spec: Family, loc, scale and optional shape
        rng: Stream to draw from

    Returns:
        One real draw

    Raises:
        InvalidParamsError: Unknown family, negative scale or bad shape
    """
    _check(spec)
    if spec.scale == 0:
        return float(spec.loc)
    rng.draws += 1
    return float(frozen_distribution(spec).rvs(random_state=rng.generator))


def weighted_index(count: int, weights: Optional[Sequence[float]], rng: RngStream) -> int:
    """Index in [0, count) drawn with probability proportional to the weights."""
    if count <= 0:
        raise InvalidParamsError("Cannot choose from an empty list")
    if weights is None:
        return rng.integers(count)
    if len(weights) != count:
        raise LengthMismatchError(count, len(weights))
    w = np.asarray(weights, dtype=float)
    if (w < 0).any() or not np.isfinite(w).all():
        raise InvalidParamsError(f"Weights must be finite and non-negative, got {list(weights)}")
    total = w.sum()
    if total == 0:
        raise AllZeroWeightsError()
    # inverse CDF on a single uniform draw
    u = rng.random() * total
    index = int(np.searchsorted(np.cumsum(w), u, side="right"))
    return min(index, count - 1)


def weighted_choice(items: Sequence[T], weights: Optional[Sequence[float]], rng: RngStream) -> T:
    """
    Pick one item; P(item_i) = w_i / sum(w), uniform when weights is None.

    Raises:
        LengthMismatchError: Weights and items differ in length
        AllZeroWeightsError: Every weight is zero
    """
    return items[weighted_index(len(items), weights, rng)]
