"""Check records, rate fits and decay tests shared by both pipelines."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

HYPOTHESIS = "hypothesis"
CONCLUSION = "conclusion"
DIAGNOSTIC = "diagnostic"

CONVERGES = "CONVERGES"
INCONCLUSIVE = "INCONCLUSIVE"
HYPOTHESIS_FAILURE = "HYPOTHESIS-FAILURE"

BASE_SLACK = 1e-8


@dataclass(frozen=True)
class HypothesisSet:
    """Hypothesis constants for one member: R >= -1/j, MinA >= A0, Diam <= D0, Vol <= V0."""

    j: float
    A0: float
    D0: float = math.inf  # not used by the singly warped argument
    V0: float = math.inf  # not used by the doubly warped argument

    def __post_init__(self):
        for name in ("j", "A0", "D0", "V0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class CheckResult:
    """One inequality check. margin > 0 means satisfied with room to spare."""

    name: str
    layer: str
    passed: bool
    measured: float
    bound: float
    margin: float
    applicable: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def upper(name, layer, measured, bound, slack=0.0, applicable=True, note="") -> CheckResult:
    """measured <= bound."""
    margin = float(bound) - float(measured)
    passed = (margin >= -(BASE_SLACK + slack)) if applicable else True
    return CheckResult(name, layer, bool(passed), float(measured), float(bound), margin, applicable, note)


def lower(name, layer, measured, bound, slack=0.0, applicable=True, note="") -> CheckResult:
    """measured >= bound."""
    margin = float(measured) - float(bound)
    passed = (margin >= -(BASE_SLACK + slack)) if applicable else True
    return CheckResult(name, layer, bool(passed), float(measured), float(bound), margin, applicable, note)


def failed(entries: Sequence[CheckResult], layer: Optional[str] = None) -> list[CheckResult]:
    return [e for e in entries if not e.passed and (layer is None or e.layer == layer)]


def all_passed(entries: Sequence[CheckResult], layer: Optional[str] = None) -> bool:
    return not failed(entries, layer)


@dataclass
class RateFit:
    """values ~ c * j^(-p), least squares on log-log."""

    c: float
    p: float
    n_points: int

    def to_dict(self) -> dict:
        return asdict(self)


def fit_rate(js: Sequence[float], values: Sequence[float], floor: float = 1e-300) -> Optional[RateFit]:
    js = np.asarray(js, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = np.isfinite(v) & (v > floor) & np.isfinite(js)
    if keep.sum() < 2:
        return None
    slope, intercept = np.polyfit(np.log(js[keep]), np.log(v[keep]), 1)
    return RateFit(float(np.exp(intercept)), float(-slope), int(keep.sum()))


@dataclass
class DecayAnalysis:
    decaying: bool
    monotone: bool


def analyse_decay(values: Sequence[float], tol: float | Sequence[float] = 1e-10) -> DecayAnalysis:
    """decaying: last <= first (within tol); monotone: no step increases beyond tol."""
    v = np.asarray(values, dtype=float)
    t = np.broadcast_to(np.asarray(tol, dtype=float), v.shape)
    if v.size < 2:
        return DecayAnalysis(True, True)
    decaying = bool(v[-1] <= v[0] + t[0] + t[-1] and (v[-1] < v[0] or v[0] <= t[0] + t[-1]))
    monotone = bool(np.all(np.diff(v) <= t[1:] + t[:-1]))
    return DecayAnalysis(decaying, monotone)
