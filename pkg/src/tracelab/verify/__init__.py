"""Exhaustive lemma checkers and the weight-scheme replay."""

from .lemmas import check_bound_2_1, check_katona, check_lemma_2_1, check_lemma_3_1, check_lemma_3_2
from .replay import VertexClassification, classify, max_disjoint_light, replay_weights
from .report import CheckReport, Counterexample

__all__ = [
    "CheckReport",
    "Counterexample",
    "check_bound_2_1",
    "check_katona",
    "check_lemma_2_1",
    "check_lemma_3_1",
    "check_lemma_3_2",
    "classify",
    "max_disjoint_light",
    "replay_weights",
    "VertexClassification",
]
