import math

import numpy as np
import pytest
from scipy.special import i0

from warptorus.checks import CONVERGES, INCONCLUSIVE, all_passed
from warptorus.generate import SequenceSpec, make_adversarial_well, make_singly
from warptorus.grid import TORUS_AREA, Field2D, PeriodicGrid2D
from warptorus.metric import SinglyWarpedMetric, log_fields
from warptorus.singly import (
    BARRIER_C,
    DEFAULT_SLABS,
    LimitCandidate2D,
    allen_sormani_verdict,
    barrier_min_bound,
    barrier_params,
    build_level_profile,
    check_average_upper,
    check_c0_lower,
    check_dirichlet_decay,
    check_minA_singly,
    layer_cake_check,
    limit_candidate,
    measure_f_convergence,
    slice_c0_convergence,
    stampacchia_threshold,
)

G = PeriodicGrid2D(64, 64)


def field(fn):
    return Field2D.from_function(G, fn)


def metric(h_fn):
    return SinglyWarpedMetric(Field2D.from_function(G, lambda x, y: np.exp(h_fn(x, y)), positive=True))


def by_name(entries):
    return {e.name: e for e in entries}


def test_jensen_against_bessel():
    eps = 0.7
    e = by_name(check_average_upper(metric(lambda x, y: eps * np.cos(x)), 1e3))
    assert abs(e["average.jensen"].measured) < 1e-12
    assert e["average.jensen"].bound == pytest.approx(TORUS_AREA * math.log(i0(eps)), rel=1e-10)
    assert e["average.jensen"].passed and e["average.int_f"].passed


def test_volume_hypothesis_failure_makes_int_f_inapplicable():
    e = by_name(check_average_upper(metric(lambda x, y: 0 * x), 10.0))
    assert not e["volume.hypothesis"].passed
    assert not e["average.int_f"].applicable


def test_dirichlet_energy_closed_form():
    eps = 1e-3
    e = by_name(check_dirichlet_decay(metric(lambda x, y: eps * (np.sin(x) + np.sin(y))), 1000))
    # fourth-order derivative error at n = 64 is about h^4 / 15
    assert e["dirichlet.energy"].measured == pytest.approx(4 * math.pi**2 * eps**2, rel=2e-5)
    assert e["dirichlet.energy"].bound == pytest.approx(2 * math.pi**2 / 1000)
    assert e["dirichlet.poincare"].passed


def test_dirichlet_on_generated_members():
    for j in (16, 256):
        m = make_singly(SequenceSpec("singly-multimode", seed=2), j)
        assert all_passed(check_dirichlet_decay(m, j))


def test_profile_of_constant_field():
    p = build_level_profile(field(lambda x, y: 0 * x + 0.5))
    assert p.max_h == 0.5
    assert p.measures[0] == pytest.approx(TORUS_AREA)
    assert p.measures[-1] == 0.0
    assert np.all(np.diff(p.measures) <= 0)


def test_stampacchia_nonpositive_h_gives_zero_d():
    p = build_level_profile(field(lambda x, y: -1 - np.sin(x) ** 2))
    d, ok, params = stampacchia_threshold(p)
    assert d == 0.0 and ok and params.C == 0.0


def test_stampacchia_constant_closed_form():
    c = 0.3
    d, ok, params = stampacchia_threshold(build_level_profile(field(lambda x, y: 0 * x + c)))
    assert d == pytest.approx(2 ** 1.75 * c, rel=1e-12)
    assert ok and params.d_torus_bound == pytest.approx(d)


def test_stampacchia_threshold_covers_generated_and_well():
    for m in (make_singly(SequenceSpec("singly-multimode", seed=5), 16), make_adversarial_well(0.9, 0.1)):
        h = log_fields(m).h
        h = h.with_values(h.values - h.values.mean())
        p = build_level_profile(h)
        d, ok, params = stampacchia_threshold(p)
        assert ok and p.max_h <= d
        assert params.C >= params.C_grid > 0


def test_layer_cake_on_smooth_field():
    p = build_level_profile(field(lambda x, y: np.sin(x) + 0.5 * np.cos(2 * y)))
    assert all_passed(layer_cake_check(p))


def test_barrier_params_range():
    with pytest.raises(ValueError):
        barrier_params(-1.0, 1.0, 10)
    p = barrier_params(-1.0, 1.0, 100)
    assert p.gamma_j == pytest.approx(math.sqrt(BARRIER_C / 200))
    with pytest.raises(ValueError):
        barrier_params(1.0, -1.0, 100)


def test_barrier_on_constant_field_has_slack_margin():
    h = field(lambda x, y: 0 * x + 0.2)
    for a, b in DEFAULT_SLABS:
        p = barrier_params(a, b, 1000)
        for e in barrier_min_bound(h, p, 1000):
            assert e.passed and e.margin > 0


def test_barrier_detects_interior_dip():
    h = field(lambda x, y: -2.0 * np.exp(-20 * (x**2 + y**2)))
    e = barrier_min_bound(h, barrier_params(-1.0, 1.0, 1000), 1000)
    assert not e[0].passed
    assert e[1].passed


def test_slices_constant_sequence():
    hs = [field(lambda x, y: 0 * x + 0.1)] * 3
    stats = slice_c0_convergence(hs, [10, 100, 1000], 0.1)
    assert all(s.fraction == 1.0 and s.max_sup == 0.0 for s in stats)
    assert all(all_passed(s.entries) for s in stats)


def test_slices_morrey_holds_for_smooth_rows():
    hs = [field(lambda x, y: np.sin(x + y) / j) for j in (10, 100)]
    stats = slice_c0_convergence(hs, [10, 100], 0.0)
    assert all(all_passed(s.entries) for s in stats)
    assert stats[1].max_sup < stats[0].max_sup


def test_c0_lower_recovers_constant():
    f_inf, js = 2.0, [10, 100, 1000]
    fs = [field(lambda x, y, j=j: f_inf - f_inf / j * (1 + np.cos(x)) / 2) for j in js]
    fit = check_c0_lower(fs, js, f_inf)
    assert fit.C_bar == pytest.approx(f_inf)
    assert fit.passed


def test_c0_lower_fails_for_growing_deficit():
    js = [10, 100]
    fs = [field(lambda x, y: 1 + 0 * x), field(lambda x, y: 0.5 + 0 * x)]
    assert not check_c0_lower(fs, js, 1.0).passed


def test_verdict_constant_and_failing_sequences():
    js = [10, 100]
    flat = [field(lambda x, y: 1 + 0 * x)] * 2
    v = allen_sormani_verdict(flat, js, 1.0, K=2.0, l2_dists=[0.0, 0.0], d_unif=[0.0, 0.0])
    assert v.verdict == CONVERGES and v.reasons == []
    v = allen_sormani_verdict(flat, js, 1.0, K=0.5, l2_dists=[0.0, 0.0])
    assert v.verdict == INCONCLUSIVE
    v = allen_sormani_verdict(flat, js, 1.0, K=2.0, l2_dists=[0.0, 0.0], d_unif=[0.01, 0.5], d_unif_err=[0.0, 0.0])
    assert "d_unif does not decay" in v.reasons


def test_minA_singly_flat():
    m = SinglyWarpedMetric.constant(G, 1.0)
    assert all_passed(check_minA_singly(m, TORUS_AREA - 1e-6))
    well = by_name(check_minA_singly(make_adversarial_well(0.9, 0.3), TORUS_AREA * 0.999))
    assert not well["minA.surrogate.x_leaf"].passed


def test_limit_candidate_and_convergence_rows():
    js = [16, 64, 256]
    ms = [make_singly(SequenceSpec("singly-multimode", seed=1), j) for j in js]
    lim = limit_candidate(ms[-1])
    assert lim.h_inf == pytest.approx(math.log(lim.f_inf))
    conv = measure_f_convergence(ms, js)
    assert conv.rates["l2_dist"].p > 0.5
    with pytest.raises(ValueError):
        LimitCandidate2D(1.0, 0.5)
