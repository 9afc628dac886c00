import math

import numpy as np
import pytest

from warptorus.checks import CONCLUSION, HYPOTHESIS, HypothesisSet, all_passed
from warptorus.doubly import (
    LimitCandidate1D,
    check_all,
    check_curvature,
    check_diameter_minima,
    check_log_gradient,
    check_minA_bounds,
    check_uniform_bounds,
    limit_candidate,
    measure_convergence,
    warp_bracket,
)
from warptorus.generate import SequenceSpec, sequence
from warptorus.grid import TORUS_AREA, Field1D, PeriodicGrid1D
from warptorus.metric import DoublyWarpedMetric


def by_name(entries):
    return {e.name: e for e in entries}


def opposite_sin(eps, n=128, scale=1.0):
    g = PeriodicGrid1D(n)
    a = Field1D(g, scale * np.exp(eps * np.sin(g.nodes)), positive=True)
    b = Field1D(g, scale * np.exp(-eps * np.sin(g.nodes)), positive=True)
    return DoublyWarpedMetric(a, b)


def flat(c=1.0, n=64):
    return DoublyWarpedMetric.constant(PeriodicGrid1D(n), c, c)


def test_flat_minA_is_tight_at_full_torus_area():
    e = by_name(check_minA_bounds(flat(), TORUS_AREA))
    for name in ("minA.surrogate.z_leaf", "minA.min_ab", "minA.int_a", "minA.int_b"):
        assert e[name].passed
        assert abs(e[name].margin) < 1e-9


def test_flat_minA_with_small_A0_has_room():
    e = by_name(check_minA_bounds(flat(), 1.0))
    assert e["minA.min_ab"].margin == pytest.approx(1 - 1 / TORUS_AREA)
    assert all(x.passed for x in e.values())


def test_minA_above_area_makes_conclusions_vacuous():
    e = by_name(check_minA_bounds(flat(), 50.0))
    assert not e["minA.surrogate.z_leaf"].passed
    assert not e["minA.min_ab"].applicable and e["minA.min_ab"].passed


def test_diameter_above_D0_marks_conclusions_inapplicable():
    entries = check_diameter_minima(flat(), 0.5, measured_diam=math.pi * math.sqrt(3))
    e = by_name(entries)
    assert not e["diameter.hypothesis"].passed
    assert all(not x.applicable for x in entries if x.layer == CONCLUSION)


def test_diameter_minima_hold_for_flat():
    d = math.pi * math.sqrt(3)
    assert all_passed(check_diameter_minima(flat(), 6.0, d))


@pytest.mark.parametrize("j", [4, 100, 10000])
def test_residual_sharp_for_opposite_sin(j):
    eps = 1 / math.sqrt(2 * j)
    assert check_curvature(opposite_sin(0.99 * eps), j)[0].passed
    assert not check_curvature(opposite_sin(1.05 * eps), j)[0].passed


def test_log_gradient_closed_forms():
    eps, j = 0.1, 100
    e = by_name(check_log_gradient(opposite_sin(eps), j, residual_ok=True))
    assert e["log_gradient.alpha"].measured == pytest.approx(math.pi * eps**2, rel=1e-6)
    assert e["log_gradient.beta"].measured == pytest.approx(math.pi * eps**2, rel=1e-6)
    assert e["log_gradient.cross_term"].measured == pytest.approx(-math.pi * eps**2, rel=1e-6)
    assert e["log_gradient.alpha"].bound == pytest.approx(2 * math.pi / j)


def test_log_gradient_threshold_sqrt_2_over_j():
    j = 100
    ok = by_name(check_log_gradient(opposite_sin(0.99 * math.sqrt(2 / j)), j, True))
    bad = by_name(check_log_gradient(opposite_sin(1.01 * math.sqrt(2 / j)), j, True))
    assert ok["log_gradient.alpha"].passed and not bad["log_gradient.alpha"].passed


def test_log_gradient_inapplicable_when_residual_fails():
    j = 100
    entries = check_log_gradient(opposite_sin(1.0), j)
    assert all(not e.applicable and e.passed for e in entries)


def test_warp_bracket_values_and_monotonicity():
    lo, hi = warp_bracket(100, 20.0, 6.0)
    w = 2 * math.pi / 10
    assert lo == pytest.approx(20 / (TORUS_AREA * 6) * math.exp(-w))
    assert hi == pytest.approx(6 * math.exp(w))
    prev = warp_bracket(1, 20.0, 6.0)
    for j in (10, 100, 1000, 10000):
        cur = warp_bracket(j, 20.0, 6.0)
        assert cur[0] > prev[0] and cur[1] < prev[1]
        prev = cur


def test_uniform_bounds_on_generated_member():
    j = 100
    m = opposite_sin(1 / math.sqrt(2 * j))
    assert all_passed(check_uniform_bounds(m, j, 20.0, 6.0))


def test_log_checks_invariant_under_rescaling():
    j, eps = 100, 0.05
    base = check_log_gradient(opposite_sin(eps), j, True)
    scaled = check_log_gradient(opposite_sin(eps, scale=3.7), j, True)
    for x, y in zip(base, scaled):
        assert x.measured == pytest.approx(y.measured, rel=1e-10, abs=1e-14)
    assert check_curvature(opposite_sin(eps, scale=3.7), j)[0].passed


def test_check_all_generated_sequence_passes():
    for g in sequence(SequenceSpec("doubly-sin", j_schedule=(10, 100, 1000))):
        rep = check_all(g.metric, HypothesisSet(g.j, 20.0, 6.0), measured_diam=5.5)
        assert rep.hypotheses_ok and rep.conclusions_ok
        assert rep.A == rep.B and rep.A_prime == rep.B_prime


def test_limit_candidate_is_exp_log_mean():
    lim = limit_candidate(opposite_sin(0.3, scale=2.0))
    assert lim.a_inf == pytest.approx(2.0) and lim.b_inf == pytest.approx(2.0)
    with pytest.raises(ValueError):
        LimitCandidate1D(0.0, 1.0)


def test_convergence_rates_for_opposite_sin_family():
    js = [10, 100, 1000, 10000]
    gens = sequence(SequenceSpec("doubly-sin", j_schedule=tuple(js)))
    conv = measure_convergence([g.metric for g in gens], js, LimitCandidate1D(1.0, 1.0))
    assert conv.rates["log_grad_sq_a"].p == pytest.approx(1.0, abs=0.05)
    assert conv.rates["w12_dist"].p == pytest.approx(0.5, abs=0.05)
    assert conv.decaying


def test_measure_convergence_flags_growth():
    js = [10, 100]
    ms = [opposite_sin(0.01), opposite_sin(0.2)]
    conv = measure_convergence(ms, js, LimitCandidate1D(1.0, 1.0))
    assert "non-decaying: w12_dist" in conv.flags
    with pytest.raises(ValueError):
        measure_convergence(ms, [10], None)


def test_hypothesis_entries_are_labelled():
    rep = check_all(flat(), HypothesisSet(10, 1.0, 6.0), measured_diam=5.5)
    layers = {e.name: e.layer for e in rep.entries}
    assert layers["curvature.residual"] == HYPOTHESIS
    assert layers["bracket.a_min"] == CONCLUSION
