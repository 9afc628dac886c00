"""Executable checks for the singly warped case, g = dx^2 + dy^2 + f(x, y)^2 dz^2.

With h = ln f the curvature hypothesis reads Laplacian h + |grad h|^2 <= 1/(2j).
Everything downstream (Dirichlet decay, the level-set profile and Stampacchia
threshold, the barrier minimum principle, slice convergence, the lower C0
bound) is measured on h and f over the 2-torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .checks import (
    CONCLUSION,
    CONVERGES,
    DIAGNOSTIC,
    HYPOTHESIS,
    INCONCLUSIVE,
    BASE_SLACK,
    CheckResult,
    HypothesisSet,
    RateFit,
    all_passed,
    analyse_decay,
    fit_rate,
    lower,
    upper,
)
from .functional import foliation_areas_singly, volume_singly
from .grid import (
    TORUS_AREA,
    TWO_PI,
    AnalysisConstants,
    Field1D,
    Field2D,
    PeriodicGrid1D,
    gradient_2d,
    gradient_energy,
    integrate,
    mean,
    norm_l2,
    norm_w12,
    richardson_estimate,
)
from .metric import SinglyWarpedMetric, elliptic_residual_singly, log_fields

CONSTANTS = AnalysisConstants()
LEVEL_COUNT = 64
STAMPACCHIA_ETA = 4.0
STAMPACCHIA_GAMMA = 7.0 / 3.0
BARRIER_C_PRIME = math.exp(-2.0 * math.pi) + math.exp(-math.pi)
BARRIER_C = 1.0 / BARRIER_C_PRIME
SLICE_TAU = 1.0


# -- types --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LevelSetProfile:
    """Level-set data of H on A(k) = {H > k}, H_k = max(H - k, 0), measured by node counting."""

    k_values: np.ndarray
    measures: np.ndarray
    hk_integrals: np.ndarray
    grad_integrals: np.ndarray
    hk2_integrals: np.ndarray
    hk_grad_integrals: np.ndarray  # int H_k |grad H|^2 = (4/9) int |grad H_k^(3/2)|^2
    max_h: float
    cell_area: float
    breakpoints: np.ndarray  # 0 followed by the sorted distinct positive node values
    breakpoint_counts: np.ndarray  # #{H > t} at each breakpoint

    def __post_init__(self):
        for name in ("k_values", "measures", "hk_integrals", "grad_integrals", "hk2_integrals",
                     "hk_grad_integrals", "breakpoints", "breakpoint_counts"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(np.diff(self.measures) > 0):
            raise ValueError("level-set measures must be non-increasing in k")
        if self.measures.size and self.measures[0] > TORUS_AREA * (1 + 1e-12):
            raise ValueError("|A(0)| exceeds the area of the torus")


@dataclass(frozen=True)
class StampacchiaParams:
    eta: float = STAMPACCHIA_ETA
    gamma: float = STAMPACCHIA_GAMMA
    C: float = 0.0
    d: float = 0.0
    k_bar: float = 0.0
    C_grid: float = 0.0  # max of the pairwise ratio over the level grid alone
    d_torus_bound: float = 0.0  # d with |A(0)| replaced by its bound 4 pi^2

    def __post_init__(self):
        if not (self.eta > 0 and self.gamma > 1 and self.C >= 0):
            raise ValueError("need eta > 0, gamma > 1, C >= 0")


@dataclass(frozen=True)
class BarrierParams:
    eta1: float
    eta2: float
    gamma_j: float
    C_prime: float = BARRIER_C_PRIME

    def __post_init__(self):
        if not (-math.pi - 1e-12 <= self.eta1 < self.eta2 <= math.pi + 1e-12):
            raise ValueError("need -pi <= eta1 < eta2 <= pi")
        if not self.gamma_j > 0:
            raise ValueError("gamma_j must be positive")


@dataclass(frozen=True)
class LimitCandidate2D:
    f_inf: float
    h_inf: float

    def __post_init__(self):
        if not self.f_inf > 0:
            raise ValueError("f_inf must be positive")
        if abs(self.f_inf - math.exp(self.h_inf)) > 1e-12 * max(1.0, self.f_inf):
            raise ValueError("f_inf must equal exp(h_inf)")

    @classmethod
    def from_f(cls, f_inf: float) -> "LimitCandidate2D":
        return cls(float(f_inf), math.log(f_inf))


def barrier_params(eta1: float, eta2: float, j: float, C: float = BARRIER_C) -> BarrierParams:
    """gamma_j = sqrt(C/(2j)); rejects gamma_j > 1, where the C_prime lower bound stops holding."""
    gamma = math.sqrt(C / (2.0 * j))
    if gamma > 1.0:
        raise ValueError(f"gamma_j = {gamma:.4g} > 1 at j = {j}; increase j or shrink C")
    return BarrierParams(eta1, eta2, gamma, 1.0 / C)


# -- average control and Dirichlet decay ---------------------------------------

def check_average_upper(m: SinglyWarpedMetric, V0: float) -> list[CheckResult]:
    """Jensen: int h <= |T^2| ln(int f / |T^2|), and int f <= V0."""
    h = log_fields(m).h
    int_h = integrate(h)
    int_f = integrate(m.f)
    vol = volume_singly(m)
    hyp = upper("volume.hypothesis", HYPOTHESIS, vol, V0, note="Vol = 2 pi int f <= V0")
    ok = hyp.passed
    note = "" if ok else "inapplicable: volume exceeds V0"
    jensen = TORUS_AREA * math.log(int_f / TORUS_AREA)
    return [
        hyp,
        upper("average.jensen", CONCLUSION, int_h, jensen, note="int h <= |T^2| ln(int f/|T^2|)"),
        upper("average.int_f", CONCLUSION, int_f, V0, 0.0, ok, note),
        upper("average.log_volume_chain", DIAGNOSTIC, int_h, math.log(V0) if V0 < math.inf else math.inf,
              note="int h <= ln V0 as chained without the |T^2| normalisation"),
    ]


def _grad_sq_2d(u: Field2D) -> float:
    return gradient_energy(u)


def _estimate(fn, u) -> float:
    try:
        return richardson_estimate(fn, u)
    except ValueError:
        return 0.0


def check_dirichlet_decay(m: SinglyWarpedMetric, j: float, residual_ok: Optional[bool] = None) -> list[CheckResult]:
    """int |grad h|^2 <= 2 pi^2/j and ||h - mean h||_L2 <= C_P ||grad h||_L2."""
    res = elliptic_residual_singly(m, j)
    if residual_ok is None:
        residual_ok = res.passed
    note = "" if residual_ok else "inapplicable: elliptic residual failed"
    h = log_fields(m).h
    energy = _grad_sq_2d(h)
    bound = 0.0 if math.isinf(j) else 2.0 * math.pi**2 / j
    # discrete int Laplacian h vanishes, so energy <= |T^2| max residual up to roundoff
    slack = TORUS_AREA * res.tolerance
    dev = norm_l2(h.with_values(h.values - mean(h)))
    grad = math.sqrt(energy)
    grad_err = _estimate(lambda u: math.sqrt(_grad_sq_2d(u)), h)
    return [
        upper("dirichlet.energy", CONCLUSION, energy, bound, slack, residual_ok, note),
        upper("dirichlet.poincare", CONCLUSION, dev, CONSTANTS.poincare_2d * grad, grad_err,
              note="||h - mean h|| <= C_P ||grad h||"),
    ]


# -- level sets and Stampacchia --------------------------------------------------

def build_level_profile(h: Field2D, k_count: int = LEVEL_COUNT) -> LevelSetProfile:
    if k_count < 1:
        raise ValueError("k grid must be non-empty")
    v = h.values
    cell = h.grid.cell_area
    top = float(v.max())
    ks = np.linspace(0.0, max(top, 0.0), k_count)
    gx, gy = gradient_2d(h)
    g2 = (gx.values**2 + gy.values**2).ravel()
    flat = v.ravel()
    excess = np.maximum(flat[None, :] - ks[:, None], 0.0)
    inside = flat[None, :] > ks[:, None]
    pos = np.unique(flat[flat > 0.0])
    breaks = np.concatenate(([0.0], pos))
    sorted_vals = np.sort(flat)
    counts = flat.size - np.searchsorted(sorted_vals, breaks, side="right")
    return LevelSetProfile(
        k_values=ks,
        measures=cell * inside.sum(axis=1),
        hk_integrals=cell * excess.sum(axis=1),
        grad_integrals=cell * (inside * g2[None, :]).sum(axis=1),
        hk2_integrals=cell * (excess**2).sum(axis=1),
        hk_grad_integrals=cell * (excess * g2[None, :]).sum(axis=1),
        max_h=top,
        cell_area=cell,
        breakpoints=breaks,
        breakpoint_counts=counts,
    )


def layer_cake_check(profile: LevelSetProfile) -> list[CheckResult]:
    """int_{A(k)} H_k = int_k^max |A(t)| dt, the right side by trapezoid over the level grid.

    |A| is monotone, so the trapezoid error on each level step is at most
    dk (|A(k_i)| - |A(k_i+1)|) / 2; summed, dk (|A(k)| - |A(max)|) / 2.
    """
    ks, A = profile.k_values, profile.measures
    out = []
    if ks.size < 2 or ks[-1] <= 0:
        return [upper("layer_cake", DIAGNOSTIC, float(np.abs(profile.hk_integrals).max(initial=0.0)), 0.0)]
    dk = ks[1] - ks[0]
    seg = 0.5 * dk * (A[:-1] + A[1:])
    tail = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))
    err = 0.5 * dk * (A - A[-1])
    excess = np.abs(profile.hk_integrals - tail) - err
    out.append(upper("layer_cake", DIAGNOSTIC, float(excess.max()), 0.0,
                     note="max over levels of |int H_k - int |A(t)| dt| minus its trapezoid bound"))
    return out


def lemma_estimates(profile: LevelSetProfile, j: float) -> list[CheckResult]:
    """The three level-set estimates, recorded as diagnostics.

    The first one rests on dropping int_{A(k)} Laplacian H, whose sign is not
    controlled, so its failure does not contradict the curvature hypothesis.
    """
    rate = 0.0 if math.isinf(j) else 1.0 / (2.0 * j)
    A = profile.measures
    rhs = rate * profile.hk_integrals + rate * A
    c = (9.0 * CONSTANTS.sobolev_8_7**2 / 4.0) ** (1.0 / 3.0)
    checks = [
        ("level.grad_vs_measure", profile.grad_integrals, rate * A),
        ("level.grad_three_halves", profile.hk_grad_integrals, rhs),
        ("level.hk_l2", np.sqrt(profile.hk2_integrals), c * np.sqrt(A) * np.cbrt(rhs)),
    ]
    out = []
    live = A > 0
    if not live.any():
        return [upper(name, DIAGNOSTIC, 0.0, 0.0, note="no nonempty level set") for name, _, _ in checks]
    for name, lhs, bound in checks:
        i = int(np.flatnonzero(live)[np.argmax((lhs - bound)[live])])
        out.append(upper(name, DIAGNOSTIC, float(lhs[i]), float(bound[i]), note=f"worst level k = {profile.k_values[i]:.4g}"))
    return out


def _grid_ratio(profile: LevelSetProfile, eta: float, gamma: float) -> float:
    ks, A = profile.k_values, profile.measures
    best = 0.0
    for i in range(ks.size):
        if A[i] <= 0:
            break
        dl = ks[i + 1:] - ks[i]
        if dl.size:
            best = max(best, float(np.max(dl**eta * A[i + 1:]) / A[i] ** gamma))
    return best


def _step_ratio(profile: LevelSetProfile, eta: float, gamma: float) -> float:
    """sup over real l > k >= 0 of (l - k)^eta |A(l)| / |A(k)|^gamma for the node-count step function.

    |A| is constant on [t_i, t_i+1) between breakpoints, so the sup pairs each
    left endpoint k = t_m with l approaching t_i+1 for i >= m.
    """
    t = profile.breakpoints
    c = profile.breakpoint_counts * profile.cell_area
    if c.size == 0 or c[0] <= 0:
        return 0.0
    nxt = np.append(t[1:], np.inf)
    live = c > 0
    t, c, nxt = t[live], c[live], nxt[live]
    # the last live step reaches up to max h where the measure drops to zero
    nxt = np.minimum(nxt, profile.max_h)
    best = 0.0
    step = 512
    for s in range(0, t.size, step):
        k = t[s:s + step]
        ck = c[s:s + step]
        # pairs (m, i) with i >= m
        dl = nxt[None, :] - k[:, None]
        mask = np.arange(t.size)[None, :] >= np.arange(s, s + k.size)[:, None]
        vals = np.where(mask, np.maximum(dl, 0.0) ** eta * c[None, :], 0.0) / ck[:, None] ** gamma
        best = max(best, float(vals.max()))
    return best


def stampacchia_threshold(profile: LevelSetProfile, params: Optional[StampacchiaParams] = None,
                          tol: float = BASE_SLACK) -> tuple[float, bool, StampacchiaParams]:
    """Fit C in (l-k)^eta |A(l)| <= C |A(k)|^gamma and return d with d^eta = C |A(0)|^(gamma-1) 2^(eta gamma/(gamma-1)).

    C is the supremum over all real level pairs of the node-count profile, so
    the fitted inequality holds over the whole profile, not only on the level grid.
    """
    params = params or StampacchiaParams()
    eta, gamma = params.eta, params.gamma
    A0 = float(profile.breakpoint_counts[0] * profile.cell_area) if profile.breakpoints.size else 0.0
    if A0 <= 0.0:
        out = StampacchiaParams(eta, gamma, 0.0, 0.0, params.k_bar)
        return 0.0, profile.max_h <= params.k_bar + tol, out
    C = max(_step_ratio(profile, eta, gamma), _grid_ratio(profile, eta, gamma))
    expo = 2.0 ** (eta * gamma / (gamma - 1.0))
    d = (C * A0 ** (gamma - 1.0) * expo) ** (1.0 / eta)
    d_torus = (C * TORUS_AREA ** (gamma - 1.0) * expo) ** (1.0 / eta)
    out = StampacchiaParams(eta, gamma, C, d, params.k_bar, _grid_ratio(profile, eta, gamma), d_torus)
    return d, profile.max_h <= params.k_bar + d + tol, out


# -- MinA -----------------------------------------------------------------------

def check_minA_singly(m: SinglyWarpedMetric, A0: float) -> list[CheckResult]:
    total, x_area, y_area = foliation_areas_singly(m)
    given = [
        lower("minA.surrogate.z_leaf", HYPOTHESIS, TORUS_AREA, A0, note="area{z=z0} = 4 pi^2"),
        lower("minA.surrogate.x_leaf", HYPOTHESIS, x_area, A0, note="min over x0 of 2 pi int f(x0, y) dy"),
        lower("minA.surrogate.y_leaf", HYPOTHESIS, y_area, A0, note="min over y0 of 2 pi int f(x, y0) dx"),
    ]
    ok = all_passed(given)
    note = "" if ok else "vacuous: foliation surrogate below A0"
    g = m.grid
    f = m.f.values
    return given + [
        lower("minA.int_f", CONCLUSION, total, A0, 0.0, ok, note),
        lower("minA.x_slices", CONCLUSION, float((g.hy * f.sum(axis=1)).min()), A0 / TWO_PI, 0.0, ok, note),
        lower("minA.y_slices", CONCLUSION, float((g.hx * f.sum(axis=0)).min()), A0 / TWO_PI, 0.0, ok, note),
    ]


# -- barrier ----------------------------------------------------------------------

def _slab_columns(grid, lo: float, hi: float) -> np.ndarray:
    """Column indices of x-nodes in [lo, hi] modulo 2 pi, in order."""
    h = grid.hx
    i0 = int(round((lo + math.pi) / h))
    i1 = int(round((hi + math.pi) / h))
    if i1 <= i0:
        raise ValueError("slab narrower than one cell")
    return np.arange(i0, i1 + 1) % grid.nx


def _barrier_entry(name, hv, cols, width_lo, width_hi, gamma, applicable, note) -> CheckResult:
    slab = hv[cols, :]
    interior_min = float(slab.min())
    boundary_min = float(min(slab[0].min(), slab[-1].min()))
    slack = math.exp(gamma * width_hi) - math.exp(gamma * width_lo)
    return lower(name, CONCLUSION, interior_min, boundary_min - slack, 0.0, applicable, note)


def barrier_min_bound(h: Field2D, params: BarrierParams, j: float, residual_ok: bool = True,
                      label: str = "") -> list[CheckResult]:
    """min_Omega h >= min_dOmega h - (e^(gamma eta2) - e^(gamma eta1)) on Omega = [eta1, eta2] x S^1.

    The complementary slab [eta2, eta1 + 2 pi] is checked in a coordinate
    centred on it, so its theta range stays inside [-pi, pi].
    """
    if params.gamma_j > 1.0:
        raise ValueError("gamma_j > 1: the C_prime bound is invalid")
    note = "" if residual_ok else "inapplicable: elliptic residual failed"
    hv = h.values
    tag = label or f"[{params.eta1:.4g},{params.eta2:.4g}]"
    w = TWO_PI - (params.eta2 - params.eta1)
    cols = _slab_columns(h.grid, params.eta1, params.eta2)
    comp = _slab_columns(h.grid, params.eta2, params.eta1 + TWO_PI)
    return [
        _barrier_entry(f"barrier.slab{tag}", hv, cols, params.eta1, params.eta2, params.gamma_j, residual_ok, note),
        _barrier_entry(f"barrier.complement{tag}", hv, comp, -w / 2, w / 2, params.gamma_j, residual_ok, note),
    ]


DEFAULT_SLABS = tuple(
    (a * math.pi / 8, b * math.pi / 8)
    for a, b in ((-4, 4), (-8, 0), (0, 8), (-2, 2), (-6, 2), (-2, 6), (-7, -1), (1, 7))
)


# -- convergence ------------------------------------------------------------------

def limit_candidate(m: SinglyWarpedMetric) -> LimitCandidate2D:
    """Mean of f at the last member."""
    return LimitCandidate2D.from_f(mean(m.f))


def convergence_row(m: SinglyWarpedMetric, limit: LimitCandidate2D) -> dict:
    h = log_fields(m).h
    f = m.f
    grad_h = gradient_energy(h)
    grad_f = gradient_energy(f)
    fmax = float(f.values.max())
    return {
        "grad_h_sq": grad_h,
        "grad_f_sq": grad_f,
        "chain_bound": fmax**2 * grad_h,
        "l2_dev": norm_l2(h.with_values(h.values - mean(h))),
        "poincare_f": norm_l2(f.with_values(f.values - mean(f))),
        "l2_dist": norm_l2(f.with_values(f.values - limit.f_inf)),
        "w12_dist": norm_w12(f.with_values(f.values - limit.f_inf)),
        "w12_h_dist": norm_w12(h.with_values(h.values - limit.h_inf)),
        "c0_dist": float(np.abs(f.values - limit.f_inf).max()),
        "max_f": fmax,
        "min_f": float(f.values.min()),
    }


RATE_KEYS = ("grad_h_sq", "grad_f_sq", "l2_dev", "l2_dist", "w12_dist", "w12_h_dist", "c0_dist", "d_unif")


@dataclass
class SinglyConvergence:
    js: list
    rows: list[dict]
    limit: LimitCandidate2D
    rates: dict[str, Optional[RateFit]] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    entries: list[CheckResult] = field(default_factory=list)

    @property
    def decaying(self) -> bool:
        return not any(f.startswith("non-decaying") for f in self.flags)


def measure_f_convergence(metrics: Sequence[SinglyWarpedMetric], js: Sequence[float],
                          limit: Optional[LimitCandidate2D] = None,
                          d_unif: Optional[Sequence[float]] = None,
                          d_unif_err: Optional[Sequence[float]] = None) -> SinglyConvergence:
    if len(metrics) != len(js) or not metrics:
        raise ValueError("need one metric per j")
    limit = limit or limit_candidate(metrics[-1])
    rows = [convergence_row(m, limit) for m in metrics]
    if d_unif is not None:
        for r, d in zip(rows, d_unif):
            r["d_unif"] = float(d)
    entries = []
    for j, m, r in zip(js, metrics, rows):
        # chain slack: the same discrete gradient appears on both sides up to f vs f * grad h roundoff
        entries.append(upper(f"chain[j={j:g}]", CONCLUSION, r["grad_f_sq"], r["chain_bound"],
                             1e-12 * max(1.0, r["chain_bound"]) + _chain_slack(m)))
    rates = {k: fit_rate(js, [r[k] for r in rows]) for k in RATE_KEYS if k in rows[0]}
    flags = []
    for key in ("l2_dist", "w12_dist", "w12_h_dist", "d_unif"):
        if key not in rows[0]:
            continue
        tol = 1e-10 if key != "d_unif" or d_unif_err is None else d_unif_err
        dec = analyse_decay([r[key] for r in rows], tol)
        if not dec.decaying:
            flags.append(f"non-decaying: {key}")
        elif not dec.monotone:
            flags.append(f"non-monotone: {key}")
    return SinglyConvergence(list(js), rows, limit, rates, flags, entries)


def _chain_slack(m: SinglyWarpedMetric) -> float:
    """Difference between grad f and f grad(ln f) under the discrete gradient, squared and integrated."""
    h = log_fields(m).h
    gfx, gfy = gradient_2d(m.f)
    ghx, ghy = gradient_2d(h)
    f = m.f.values
    ex = gfx.values - f * ghx.values
    ey = gfy.values - f * ghy.values
    cross = np.abs(gfx.values * ex) + np.abs(gfy.values * ey)
    return float(m.grid.cell_area * np.sum(2.0 * cross + ex**2 + ey**2))


@dataclass
class SliceStats:
    j: float
    fraction: float
    threshold: float
    max_w12: float
    max_sup: float
    entries: list[CheckResult]


def slice_c0_convergence(hs: Sequence[Field2D], js: Sequence[float], h_inf: float,
                         tau: float = SLICE_TAU) -> list[SliceStats]:
    """Per row y0: 1-D W^{1,2} distance of h_j(., y0) to h_inf and its Morrey bound on the sup distance.

    Morrey on the circle: sup |u| <= ||u||_L2 / sqrt(2 pi) + sqrt(2 pi) ||u'||_L2.
    The fraction counts rows with sup |u| <= tau / sqrt(j).
    """
    out = []
    for h, j in zip(hs, js):
        g1 = PeriodicGrid1D(h.grid.nx)
        worst_gap = -math.inf
        sups, w12s, bounds = [], [], []
        for row in range(h.grid.ny):
            u = Field1D(g1, h.values[:, row] - h_inf)
            l2 = norm_l2(u)
            grad = math.sqrt(gradient_energy(u))
            sup = float(np.abs(u.values).max())
            bound = l2 / math.sqrt(TWO_PI) + math.sqrt(TWO_PI) * grad
            sups.append(sup)
            w12s.append(math.sqrt(l2**2 + grad**2))
            bounds.append(bound)
            worst_gap = max(worst_gap, sup - bound)
        sups = np.array(sups)
        thr = tau / math.sqrt(j)
        i = int(np.argmax(sups - np.array(bounds)))
        entry = upper(f"slice.morrey[j={j:g}]", CONCLUSION, sups[i], bounds[i], 1e-8 * max(1.0, bounds[i]))
        out.append(SliceStats(j, float(np.mean(sups <= thr)), thr, float(max(w12s)), float(sups.max()), [entry]))
    return out


@dataclass
class LowerBoundFit:
    C_bar: float
    deficits: list[float]
    passed: bool
    entry: CheckResult


def check_c0_lower(fs: Sequence[Field2D], js: Sequence[float], f_inf: float) -> LowerBoundFit:
    """Smallest C_bar with min f_j >= f_inf - C_bar / j over the sequence; pass if the deficit decays."""
    deficits = [max(f_inf - float(f.values.min()), 0.0) for f in fs]
    c_bar = max(j * d for j, d in zip(js, deficits))
    dec = analyse_decay(deficits, 1e-12)
    ok = math.isfinite(c_bar) and dec.decaying
    entry = CheckResult("c0_lower", CONCLUSION, bool(ok), c_bar, math.inf, math.inf if ok else -math.inf,
                        note=f"deficits {', '.join(f'{d:.3g}' for d in deficits)}")
    return LowerBoundFit(c_bar, deficits, ok, entry)


@dataclass
class Verdict:
    verdict: str
    reasons: list[str]
    K: float
    c0: float


def allen_sormani_verdict(fs: Sequence[Field2D], js: Sequence[float], f_inf: float, K: float,
                          l2_dists: Sequence[float], d_unif: Optional[Sequence[float]] = None,
                          d_unif_err: Optional[Sequence[float]] = None) -> Verdict:
    """CONVERGES when f_j -> f_inf in L2, f_inf - c0/j <= f_j <= K with f_inf - c0/j > 0, and d_unif decays."""
    reasons = []
    if not analyse_decay(l2_dists, 1e-10).decaying:
        reasons.append("L2 distance to f_inf does not decay")
    lower_fit = check_c0_lower(fs, js, f_inf)
    if not lower_fit.passed:
        reasons.append("lower C0 deficit does not decay")
    elif f_inf - lower_fit.C_bar / js[-1] <= 0:
        reasons.append("f_inf - c0/j is not positive at the last j")
    top = max(float(f.values.max()) for f in fs)
    if not top <= K:
        reasons.append(f"max f_j = {top:.4g} exceeds K = {K:.4g}")
    if d_unif is not None:
        tol = 1e-10 if d_unif_err is None else d_unif_err
        if not analyse_decay(d_unif, tol).decaying:
            reasons.append("d_unif does not decay")
    return Verdict(CONVERGES if not reasons else INCONCLUSIVE, reasons, K, lower_fit.C_bar)
