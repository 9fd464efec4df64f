"""Maximally recoverable LRCs from linearized Reed-Solomon outer codes."""

from .gf import FieldTower, GF2m, OrderedBasis, build_tower, gf, polynomial_basis, primitive_element
from .sumrank import SumRankPartition, min_distance, sum_rank_weight

__version__ = "0.1.0"

__all__ = [
    "FieldTower",
    "GF2m",
    "OrderedBasis",
    "SumRankPartition",
    "build_tower",
    "gf",
    "min_distance",
    "polynomial_basis",
    "primitive_element",
    "sum_rank_weight",
]
