"""Per-j evaluation and sequence-level aggregation for both cases."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import doubly, singly
from .checks import (
    CONCLUSION,
    CONVERGES,
    HYPOTHESIS,
    HYPOTHESIS_FAILURE,
    INCONCLUSIVE,
    CheckResult,
    HypothesisSet,
    all_passed,
    failed,
)
from .config import RunConfig
from .functional import SampleSpec, distance_summary, foliation_areas_doubly, foliation_areas_singly, volume
from .generate import GenerationError, Generated, generate_member
from .metric import curvature_floor, log_fields

EXIT_CODES = {CONVERGES: 0, INCONCLUSIVE: 2, HYPOTHESIS_FAILURE: 3}


@dataclass
class MemberResult:
    j: float
    amplitude: float
    r_min: float
    volume: float
    foliation_areas: tuple
    diameter: Optional[float] = None
    diameter_err: Optional[float] = None
    d_unif: Optional[float] = None
    d_unif_err: Optional[float] = None
    d_unif_closed_form: Optional[float] = None
    entries: list[CheckResult] = field(default_factory=list)
    extras: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    case: str
    config: dict
    rows: list[MemberResult]
    convergence: list[dict]
    limit: dict
    rates: dict
    flags: list[str]
    sequence_entries: list[CheckResult]
    verdict: str
    reasons: list[str]
    extras: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


def hypothesis_set(cfg: RunConfig, j: float) -> HypothesisSet:
    hyp = cfg.hypotheses
    return HypothesisSet(j=j, A0=hyp.A0, D0=hyp.D0 or math.inf, V0=hyp.V0 or math.inf)


def _keep(cfg: RunConfig, group: str, entries: list[CheckResult]) -> list[CheckResult]:
    return entries if cfg.enabled(group) else []


def _distances(cfg: RunConfig, metric, scales):
    if not cfg.enabled("distances"):
        return None
    sample = SampleSpec(cfg.resolution.lattice, cfg.resolution.source_stride)
    return distance_summary(metric, sample, scales)


def evaluate_doubly(cfg: RunConfig, gen: Generated, scales) -> MemberResult:
    m, j = gen.metric, gen.j
    hyp = hypothesis_set(cfg, j)
    dist = _distances(cfg, m, scales)
    res = MemberResult(j, gen.amplitude, curvature_floor(m), volume(m), foliation_areas_doubly(m))
    if dist is not None:
        res.diameter, res.diameter_err = dist.diameter, dist.diameter_err
        res.d_unif, res.d_unif_err, res.d_unif_closed_form = dist.d_unif, dist.d_unif_err, dist.d_unif_closed_form
    curv = doubly.check_curvature(m, j)
    residual_ok = curv[0].passed
    entries = list(curv)
    entries += _keep(cfg, "minA", doubly.check_minA_bounds(m, hyp.A0))
    if dist is not None and cfg.enabled("diameter"):
        entries += doubly.check_diameter_minima(m, hyp.D0, dist.diameter, dist.diameter_err)
    entries += _keep(cfg, "log_gradient", doubly.check_log_gradient(m, j, residual_ok))
    if cfg.enabled("uniform_bounds"):
        entries += doubly.check_uniform_bounds(m, j, hyp.A0, hyp.D0, all_passed(entries, HYPOTHESIS))
    lo, hi = doubly.warp_bracket(j, hyp.A0, hyp.D0)
    res.entries = entries
    res.extras = {"A": lo, "A_prime": hi, "B": lo, "B_prime": hi}
    return res


def evaluate_singly(cfg: RunConfig, gen: Generated, scales) -> MemberResult:
    m, j = gen.metric, gen.j
    hyp = hypothesis_set(cfg, j)
    dist = _distances(cfg, m, scales)
    res = MemberResult(j, gen.amplitude, curvature_floor(m), volume(m), foliation_areas_singly(m))
    if dist is not None:
        res.diameter, res.diameter_err = dist.diameter, dist.diameter_err
        res.d_unif, res.d_unif_err, res.d_unif_closed_form = dist.d_unif, dist.d_unif_err, dist.d_unif_closed_form
    resid = singly.elliptic_residual_singly(m, j)
    entries = [
        singly.upper("curvature.residual", HYPOTHESIS, resid.max_residual, resid.bound, resid.tolerance,
                     note="Laplacian h + |grad h|^2 <= 1/(2j), i.e. R >= -1/j"),
        singly.upper("curvature.log_identity", "diagnostic", resid.identity_error, 0.0, resid.tolerance),
    ]
    residual_ok = resid.passed
    entries += _keep(cfg, "minA", singly.check_minA_singly(m, hyp.A0))
    entries += _keep(cfg, "average", singly.check_average_upper(m, hyp.V0))
    entries += _keep(cfg, "dirichlet", singly.check_dirichlet_decay(m, j, residual_ok))
    h = log_fields(m).h
    extras = {}
    if cfg.enabled("stampacchia"):
        profile = singly.build_level_profile(h)
        d, ok, params = singly.stampacchia_threshold(profile)
        entries.append(singly.upper("stampacchia.max_h", CONCLUSION, profile.max_h, params.k_bar + d,
                                    note="max h <= k_bar + d with C fitted over the whole profile"))
        entries += singly.layer_cake_check(profile)
        entries += singly.lemma_estimates(profile, j)
        extras.update(stampacchia_d=d, stampacchia_C=params.C, stampacchia_C_grid=params.C_grid,
                      stampacchia_d_torus_bound=params.d_torus_bound, max_h=profile.max_h,
                      measure_A0=float(profile.measures[0]), measure_bound_torus=singly.TORUS_AREA,
                      measure_bound_volume=hyp.V0)
    if cfg.enabled("barrier"):
        slabs = cfg.slabs or singly.DEFAULT_SLABS
        try:
            for a, b in slabs:
                entries += singly.barrier_min_bound(h, singly.barrier_params(a, b, j), j, residual_ok)
        except ValueError as e:
            entries.append(CheckResult("barrier", CONCLUSION, True, math.nan, math.nan, math.nan,
                                       applicable=False, note=f"inapplicable: {e}"))
    res.entries = entries
    res.extras = extras
    return res


def _evaluate(args) -> MemberResult:
    cfg, gen, scales = args
    fn = evaluate_doubly if cfg.case == "doubly" else evaluate_singly
    return fn(cfg, gen, scales)


def generate_all(cfg: RunConfig) -> list[Generated]:
    spec = cfg.spec.build()
    return [generate_member(spec, j, cfg.resolution.n1d, cfg.resolution.n2d) for j in spec.j_schedule]


def _limit_scales(cfg: RunConfig, last) -> tuple:
    if cfg.case == "doubly":
        lim = doubly.limit_candidate(last)
        return (lim.a_inf, lim.b_inf)
    return (singly.limit_candidate(last).f_inf,)


def _generation_failure(cfg: RunConfig, err: GenerationError) -> ConvergenceReport:
    entry = CheckResult("generation", HYPOTHESIS, False, math.nan, math.nan, math.nan,
                        note=f"rejected at generation: {err}")
    return ConvergenceReport(cfg.case, cfg.model_dump(), [], [], {}, {}, [], [entry],
                             HYPOTHESIS_FAILURE, [f"hypothesis failure: generation rejected ({err})"])


def run_pipeline(cfg: RunConfig, workers: Optional[int] = None) -> ConvergenceReport:
    try:
        gens = generate_all(cfg)
    except GenerationError as e:
        return _generation_failure(cfg, e)
    scales = _limit_scales(cfg, gens[-1].metric)
    jobs = [(cfg, g, scales) for g in gens]
    workers = workers or cfg.worker_count
    if workers <= 1 or len(jobs) == 1:
        rows = [_evaluate(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rows = list(pool.map(_evaluate, jobs))
    if cfg.case == "doubly":
        return _aggregate_doubly(cfg, gens, rows)
    return _aggregate_singly(cfg, gens, rows)


def _hypothesis_reasons(rows: list[MemberResult]) -> list[str]:
    reasons = []
    for r in rows:
        for e in failed(r.entries, HYPOTHESIS):
            reasons.append(f"hypothesis failure at j={r.j:g}: {e.name} (margin {e.margin:.3g})")
    return reasons


def _conclusion_reasons(rows: list[MemberResult], extra: list[CheckResult] = ()) -> list[str]:
    reasons = []
    for r in rows:
        for e in failed(r.entries, CONCLUSION):
            reasons.append(f"conclusion failed at j={r.j:g}: {e.name} (margin {e.margin:.3g})")
    for e in failed(list(extra), CONCLUSION):
        reasons.append(f"conclusion failed: {e.name}")
    return reasons


def _d_unif_series(rows: list[MemberResult]):
    if any(r.d_unif is None for r in rows):
        return None, None
    return [r.d_unif for r in rows], [r.d_unif_err for r in rows]


def _aggregate_doubly(cfg: RunConfig, gens, rows: list[MemberResult]) -> ConvergenceReport:
    js = [g.j for g in gens]
    du, du_err = _d_unif_series(rows)
    conv = doubly.measure_convergence([g.metric for g in gens], js, d_unif=du, d_unif_err=du_err)
    reasons = _hypothesis_reasons(rows)
    if reasons:
        verdict = HYPOTHESIS_FAILURE
    else:
        reasons = _conclusion_reasons(rows) + [f for f in conv.flags if f.startswith("non-decaying")]
        verdict = CONVERGES if not reasons else INCONCLUSIVE
    rates = {k: (v.to_dict() if v else None) for k, v in conv.rates.items()}
    return ConvergenceReport("doubly", cfg.model_dump(), rows, conv.rows,
                             {"a_inf": conv.limit.a_inf, "b_inf": conv.limit.b_inf},
                             rates, conv.flags, [], verdict, reasons)


def _aggregate_singly(cfg: RunConfig, gens, rows: list[MemberResult]) -> ConvergenceReport:
    js = [g.j for g in gens]
    metrics = [g.metric for g in gens]
    du, du_err = _d_unif_series(rows)
    conv = singly.measure_f_convergence(metrics, js, d_unif=du, d_unif_err=du_err)
    seq_entries = list(conv.entries)
    extras = {}
    if cfg.enabled("slices"):
        stats = singly.slice_c0_convergence([log_fields(m).h for m in metrics], js, conv.limit.h_inf)
        for s in stats:
            seq_entries += s.entries
        extras["slice_fraction"] = [s.fraction for s in stats]
        extras["slice_threshold"] = [s.threshold for s in stats]
        extras["slice_max_sup"] = [s.max_sup for s in stats]
        extras["slice_max_w12"] = [s.max_w12 for s in stats]
    ds = [r.extras.get("stampacchia_d") for r in rows]
    K = math.exp(max(ds)) if all(d is not None for d in ds) else math.inf
    fs = [m.f for m in metrics]
    if cfg.enabled("c0_lower"):
        fit = singly.check_c0_lower(fs, js, conv.limit.f_inf)
        seq_entries.append(fit.entry)
        extras["c_bar"] = fit.C_bar
        extras["c0_deficits"] = fit.deficits
    extras["K"] = K
    reasons = _hypothesis_reasons(rows)
    if reasons:
        verdict = HYPOTHESIS_FAILURE
    else:
        v = singly.allen_sormani_verdict(fs, js, conv.limit.f_inf, K, [r["l2_dist"] for r in conv.rows], du, du_err)
        reasons = _conclusion_reasons(rows, seq_entries) + v.reasons
        verdict = CONVERGES if not reasons else INCONCLUSIVE
    rates = {k: (v.to_dict() if v else None) for k, v in conv.rates.items()}
    return ConvergenceReport("singly", cfg.model_dump(), rows, conv.rows,
                             {"f_inf": conv.limit.f_inf, "h_inf": conv.limit.h_inf},
                             rates, conv.flags, seq_entries, verdict, reasons, extras)
