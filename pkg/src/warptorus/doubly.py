"""Executable checks for the doubly warped case, g = a(z)^2 dx^2 + b(z)^2 dy^2 + dz^2.

Each check returns CheckResult entries in two layers. Hypothesis entries test
the assumptions (curvature floor, foliation areas standing in for MinA,
diameter); conclusion entries test the inequalities those assumptions imply.
A conclusion whose premise failed is recorded as not applicable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .checks import (
    CONCLUSION,
    DIAGNOSTIC,
    HYPOTHESIS,
    CheckResult,
    HypothesisSet,
    RateFit,
    all_passed,
    analyse_decay,
    fit_rate,
    lower,
    upper,
)
from .functional import foliation_areas_doubly
from .grid import (
    TORUS_AREA,
    TWO_PI,
    Field1D,
    coarsen,
    derivative_1d,
    holder_half_seminorm,
    integrate,
    mean,
    norm_l2,
    norm_w12,
    richardson_estimate,
)
from .metric import DoublyWarpedMetric, log_fields, log_residual_doubly


@dataclass(frozen=True)
class LimitCandidate1D:
    a_inf: float
    b_inf: float

    def __post_init__(self):
        if not (self.a_inf > 0 and self.b_inf > 0):
            raise ValueError("limit warps must be positive")


def warp_bracket(j: float, A0: float, D0: float) -> tuple[float, float]:
    """(A0/(4 pi^2 D0) e^(-2 pi/sqrt j), D0 e^(2 pi/sqrt j)), the uniform bracket for a_j and b_j."""
    w = TWO_PI / math.sqrt(j)
    return A0 / (TORUS_AREA * D0) * math.exp(-w), D0 * math.exp(w)


def _quad_err(fn, u: Field1D) -> float:
    try:
        return richardson_estimate(fn, u)
    except ValueError:
        return 0.0


def check_curvature(m: DoublyWarpedMetric, j: float) -> list[CheckResult]:
    res = log_residual_doubly(m, j)
    return [
        upper("curvature.residual", HYPOTHESIS, res.max_residual, res.bound, res.tolerance,
              note="alpha''+beta''+alpha'^2+beta'^2+alpha'beta' <= 1/(2j), i.e. R >= -1/j"),
        upper("curvature.log_identity", DIAGNOSTIC, res.identity_error, 0.0, res.tolerance,
              note="log-form residual equals -R/2"),
    ]


def check_minA_bounds(m: DoublyWarpedMetric, A0: float) -> list[CheckResult]:
    z_area, x_area, y_area = foliation_areas_doubly(m)
    given = [
        lower("minA.surrogate.z_leaf", HYPOTHESIS, z_area, A0, note="min over z0 of area{z=z0}"),
        lower("minA.surrogate.x_leaf", HYPOTHESIS, x_area, A0, note="area{x=x0} = 2 pi int b"),
        lower("minA.surrogate.y_leaf", HYPOTHESIS, y_area, A0, note="area{y=y0} = 2 pi int a"),
    ]
    ok = all_passed(given)
    note = "" if ok else "vacuous: foliation surrogate below A0"
    ab = m.a.with_values(m.a.values * m.b.values)
    err_ab = _quad_err(lambda u: float(u.values.min()), ab)
    err_a = _quad_err(integrate, m.a)
    err_b = _quad_err(integrate, m.b)
    derived = [
        lower("minA.min_ab", CONCLUSION, ab.values.min(), A0 / TORUS_AREA, err_ab, ok, note),
        lower("minA.int_a", CONCLUSION, integrate(m.a), A0 / TWO_PI, err_a, ok, note),
        lower("minA.int_b", CONCLUSION, integrate(m.b), A0 / TWO_PI, err_b, ok, note),
    ]
    return given + derived


def check_diameter_minima(m: DoublyWarpedMetric, D0: float, measured_diam: float,
                          diam_err: float = 0.0) -> list[CheckResult]:
    """min a <= Diam and min b <= Diam, and hence <= D0, given Diam <= D0."""
    hyp = upper("diameter.hypothesis", HYPOTHESIS, measured_diam - diam_err, D0,
                note="lattice diameter (less its error bar) <= D0")
    ok = hyp.passed
    note = "" if ok else "inapplicable: diameter exceeds D0"
    amin, bmin = float(m.a.values.min()), float(m.b.values.min())
    return [
        hyp,
        upper("diameter.min_a_vs_diam", CONCLUSION, amin, measured_diam, diam_err, ok, note),
        upper("diameter.min_b_vs_diam", CONCLUSION, bmin, measured_diam, diam_err, ok, note),
        upper("diameter.min_a_vs_D0", CONCLUSION, amin, D0, diam_err, ok, note),
        upper("diameter.min_b_vs_D0", CONCLUSION, bmin, D0, diam_err, ok, note),
    ]


def _grad_sq(u: Field1D) -> float:
    d = derivative_1d(u, 1).values
    return float(u.grid.h * np.sum(d * d))


def check_log_gradient(m: DoublyWarpedMetric, j: float, residual_ok: Optional[bool] = None) -> list[CheckResult]:
    """int alpha'^2 <= 2 pi/j, int beta'^2 <= 2 pi/j, and int a'b'/(ab) >= -pi/j."""
    if residual_ok is None:
        residual_ok = log_residual_doubly(m, j).passed
    note = "" if residual_ok else "inapplicable: curvature residual failed"
    lf = log_fields(m)
    ga, gb = _grad_sq(lf.alpha), _grad_sq(lf.beta)

    def cross(a: Field1D, b: Field1D) -> float:
        da = derivative_1d(a, 1).values
        db = derivative_1d(b, 1).values
        return float(a.grid.h * np.sum(da * db / (a.values * b.values)))

    x = cross(m.a, m.b)
    x_err = abs(x - cross(coarsen(m.a), coarsen(m.b)))
    return [
        upper("log_gradient.alpha", CONCLUSION, ga, TWO_PI / j, _quad_err(_grad_sq, lf.alpha), residual_ok, note),
        upper("log_gradient.beta", CONCLUSION, gb, TWO_PI / j, _quad_err(_grad_sq, lf.beta), residual_ok, note),
        lower("log_gradient.cross_term", CONCLUSION, x, -math.pi / j, x_err, residual_ok, note),
    ]


def check_uniform_bounds(m: DoublyWarpedMetric, j: float, A0: float, D0: float,
                         hypotheses_ok: bool = True) -> list[CheckResult]:
    """Pointwise bracket on a and b, plus the oscillation step max alpha - min alpha <= sqrt(2 pi) ||alpha'||."""
    lo, hi = warp_bracket(j, A0, D0)
    note = "" if hypotheses_ok else "inapplicable: hypotheses failed"
    lf = log_fields(m)
    out = []
    for name, warp, logf in (("a", m.a, lf.alpha), ("b", m.b, lf.beta)):
        out.append(lower(f"bracket.{name}_min", CONCLUSION, warp.values.min(), lo, 0.0, hypotheses_ok, note))
        out.append(upper(f"bracket.{name}_max", CONCLUSION, warp.values.max(), hi, 0.0, hypotheses_ok, note))
        osc = float(np.ptp(logf.values))
        cs = math.sqrt(TWO_PI) * math.sqrt(_grad_sq(logf))
        out.append(upper(f"oscillation.{name}", CONCLUSION, osc, cs, _quad_err(_grad_sq, logf) ** 0.5 * 3.0,
                         hypotheses_ok, note))
        out.append(upper(f"oscillation.{name}_vs_j", CONCLUSION, osc, TWO_PI / math.sqrt(j), 0.0, hypotheses_ok, note))
    return out


@dataclass
class DoublyCheckReport:
    j: float
    entries: list[CheckResult]
    A: float
    A_prime: float
    B: float
    B_prime: float

    @property
    def hypotheses_ok(self) -> bool:
        return all_passed(self.entries, HYPOTHESIS)

    @property
    def conclusions_ok(self) -> bool:
        return all_passed(self.entries, CONCLUSION)


def check_all(m: DoublyWarpedMetric, hyp: HypothesisSet, measured_diam: Optional[float] = None,
              diam_err: float = 0.0) -> DoublyCheckReport:
    entries = check_curvature(m, hyp.j)
    residual_ok = entries[0].passed
    entries += check_minA_bounds(m, hyp.A0)
    if measured_diam is not None:
        entries += check_diameter_minima(m, hyp.D0, measured_diam, diam_err)
    entries += check_log_gradient(m, hyp.j, residual_ok)
    hyp_ok = all_passed(entries, HYPOTHESIS)
    entries += check_uniform_bounds(m, hyp.j, hyp.A0, hyp.D0, hyp_ok)
    lo, hi = warp_bracket(hyp.j, hyp.A0, hyp.D0)
    return DoublyCheckReport(hyp.j, entries, lo, hi, lo, hi)


# -- convergence --------------------------------------------------------------

def limit_candidate(m: DoublyWarpedMetric) -> LimitCandidate1D:
    """exp of the log-averages of the last member."""
    lf = log_fields(m)
    return LimitCandidate1D(math.exp(mean(lf.alpha)), math.exp(mean(lf.beta)))


def convergence_row(m: DoublyWarpedMetric, limit: LimitCandidate1D) -> dict:
    lf = log_fields(m)
    out = {}
    for name, warp, logf, inf in (("a", m.a, lf.alpha, limit.a_inf), ("b", m.b, lf.beta, limit.b_inf)):
        dev = logf.with_values(logf.values - mean(logf))
        diff = warp.with_values(warp.values - inf)
        out[f"l2_log_dev_{name}"] = norm_l2(dev)
        out[f"log_grad_sq_{name}"] = _grad_sq(logf)
        out[f"l2_{name}"] = norm_l2(diff)
        out[f"w12_{name}"] = norm_w12(diff)
        out[f"holder_{name}"] = float(np.abs(diff.values).max()) + holder_half_seminorm(diff)
    out["l2_dev"] = max(out["l2_log_dev_a"], out["l2_log_dev_b"])
    out["l2_dist"] = max(out["l2_a"], out["l2_b"])
    out["w12_dist"] = max(out["w12_a"], out["w12_b"])
    out["c0_dist"] = max(out["holder_a"], out["holder_b"])
    return out


RATE_KEYS = ("l2_dev", "l2_dist", "w12_dist", "c0_dist", "log_grad_sq_a", "log_grad_sq_b", "d_unif")


@dataclass
class DoublyConvergence:
    js: list
    rows: list[dict]
    limit: LimitCandidate1D
    rates: dict[str, Optional[RateFit]] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    @property
    def decaying(self) -> bool:
        return not any(f.startswith("non-decaying") for f in self.flags)


def measure_convergence(metrics: Sequence[DoublyWarpedMetric], js: Sequence[float],
                        limit: Optional[LimitCandidate1D] = None,
                        d_unif: Optional[Sequence[float]] = None,
                        d_unif_err: Optional[Sequence[float]] = None) -> DoublyConvergence:
    if len(metrics) != len(js) or not metrics:
        raise ValueError("need one metric per j")
    if limit is None:
        limit = limit_candidate(metrics[-1])
    rows = [convergence_row(m, limit) for m in metrics]
    if d_unif is not None:
        for r, d in zip(rows, d_unif):
            r["d_unif"] = float(d)
    rates = {k: fit_rate(js, [r[k] for r in rows]) for k in RATE_KEYS if k in rows[0]}
    flags = []
    for key in ("w12_dist", "l2_dev", "c0_dist", "d_unif"):
        if key not in rows[0]:
            continue
        tol = 1e-10 if key != "d_unif" or d_unif_err is None else d_unif_err
        dec = analyse_decay([r[key] for r in rows], tol)
        if not dec.decaying:
            flags.append(f"non-decaying: {key}")
        elif not dec.monotone:
            flags.append(f"non-monotone: {key}")
    return DoublyConvergence(list(js), rows, limit, rates, flags)
