"""Properly balanced subgraphs: checking, oracles, decomposition, FPT search."""

from .brute import SearchTooLarge, brute_force_negative_pbs
from .check import check_properly_balanced, imbalance, selection_weight
from .decompose import decompose_balanced_subgraph, f_bound
from .fpt import FptResult, WeightRestrictionError, fpt_negative_pbs
from .patterns import (Label, LabeledPattern, embed_labeled_pattern,
                       enumerate_balanced_patterns)

__all__ = [
    "FptResult", "Label", "LabeledPattern", "SearchTooLarge",
    "WeightRestrictionError", "brute_force_negative_pbs",
    "check_properly_balanced", "decompose_balanced_subgraph",
    "embed_labeled_pattern", "enumerate_balanced_patterns", "f_bound",
    "fpt_negative_pbs", "imbalance", "selection_weight",
]
