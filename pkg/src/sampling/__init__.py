"""
Seeded sampling: random streams, pdf families and weighted choice.
"""

from .distributions import frozen_distribution, sample_pdf, weighted_choice, weighted_index
from .rng import ALGORITHM, RngStream

__all__ = ["ALGORITHM", "RngStream", "frozen_distribution", "sample_pdf", "weighted_choice", "weighted_index"]
