"""
Request and instance similarity.
"""

from .matching import (
    SimilarityResult,
    SimilarityThresholds,
    brute_force_assignment,
    diversity_filter,
    instance_similarity,
    pair_similarity,
    similarity_level,
    similarity_matrix,
)

__all__ = [
    "SimilarityResult",
    "SimilarityThresholds",
    "brute_force_assignment",
    "diversity_filter",
    "instance_similarity",
    "pair_similarity",
    "similarity_level",
    "similarity_matrix",
]
