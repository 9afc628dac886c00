"""Numerical checks for warped-product metrics on the 3-torus with almost non-negative scalar curvature."""

from .checks import CONVERGES, HYPOTHESIS_FAILURE, INCONCLUSIVE, CheckResult, HypothesisSet
from .generate import GenerationError, SequenceSpec, make_adversarial_well, make_doubly, make_singly
from .grid import Field1D, Field2D, PeriodicGrid1D, PeriodicGrid2D
from .metric import DoublyWarpedMetric, SinglyWarpedMetric

__all__ = [
    "CONVERGES",
    "HYPOTHESIS_FAILURE",
    "INCONCLUSIVE",
    "CheckResult",
    "DoublyWarpedMetric",
    "Field1D",
    "Field2D",
    "GenerationError",
    "HypothesisSet",
    "PeriodicGrid1D",
    "PeriodicGrid2D",
    "SequenceSpec",
    "SinglyWarpedMetric",
    "make_adversarial_well",
    "make_doubly",
    "make_singly",
]
