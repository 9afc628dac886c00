import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from warptorus.checks import fit_rate, lower, upper
from warptorus.generate import SequenceSpec, generate_member
from warptorus.grid import TORUS_AREA, Field1D, Field2D, PeriodicGrid1D, PeriodicGrid2D, gradient_energy, integrate, mean, norm_l2
from warptorus.metric import DoublyWarpedMetric, SinglyWarpedMetric, elliptic_residual_singly, log_residual_doubly
from warptorus.singly import build_level_profile, layer_cake_check, slice_c0_convergence, stampacchia_threshold

G2 = PeriodicGrid2D(32, 32)
G1 = PeriodicGrid1D(64)
SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

coef = st.floats(-1.0, 1.0, allow_nan=False)
modes2 = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), coef, coef), min_size=1, max_size=5)


def field2(ms, offset=0.0):
    X, Y = G2.mesh()
    v = np.full_like(X, offset)
    for p, q, c, s in ms:
        v += c * np.cos(p * X + q * Y) + s * np.sin(p * X + q * Y)
    return Field2D(G2, v)


@SETTINGS
@given(modes2)
def test_poincare_on_torus(ms):
    u = field2(ms)
    dev = norm_l2(u.with_values(u.values - mean(u)))
    # equality for first eigenmodes; the discrete gradient undershoots by O(h^4)
    assert dev <= math.sqrt(gradient_energy(u)) * (1 + 2e-4) + 1e-9


@SETTINGS
@given(modes2)
def test_jensen(ms):
    h = field2(ms)
    f = h.with_values(np.exp(h.values))
    assert integrate(h) <= TORUS_AREA * math.log(integrate(f) / TORUS_AREA) + 1e-9


@SETTINGS
@given(modes2, st.floats(-0.5, 0.5))
def test_layer_cake_and_stampacchia(ms, offset):
    p = build_level_profile(field2(ms, offset))
    assert layer_cake_check(p)[0].passed
    d, ok, _ = stampacchia_threshold(p)
    assert ok and p.max_h <= d + 1e-8


@SETTINGS
@given(modes2)
def test_morrey_on_rows(ms):
    s = slice_c0_convergence([field2(ms)], [1.0], 0.0)[0]
    assert s.entries[0].passed


@SETTINGS
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 1))
def test_margin_sign_matches_pass(m, b, slack):
    u = upper("u", "conclusion", m, b, slack)
    lo = lower("l", "conclusion", m, b, slack)
    assert u.margin == -lo.margin
    assert u.passed == (b - m >= -(1e-8 + slack))
    assert lower("x", "conclusion", m, b, applicable=False).passed


@SETTINGS
@given(st.floats(0.1, 2.0), st.floats(0.1, 10.0))
def test_fit_rate_recovers_power_law(p, c):
    js = [10.0, 100.0, 1000.0]
    fit = fit_rate(js, [c * j ** -p for j in js])
    assert abs(fit.p - p) < 1e-9 and abs(fit.c - c) < 1e-8 * c


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["doubly-multimode", "singly-multimode", "singly-sin"]),
       st.integers(0, 50), st.sampled_from([3, 30, 300]))
def test_generated_members_satisfy_curvature_floor(kind, seed, j):
    g = generate_member(SequenceSpec(kind, seed=seed), j, n1d=64, n2d=32)
    check = log_residual_doubly if isinstance(g.metric, DoublyWarpedMetric) else elliptic_residual_singly
    assert check(g.metric, j).passed


@SETTINGS
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_constant_warps_have_zero_residual(a, b):
    m = DoublyWarpedMetric.constant(G1, a, b)
    assert log_residual_doubly(m, 1).max_residual <= 1e-10
    s = SinglyWarpedMetric.constant(G2, a)
    assert elliptic_residual_singly(s, 1).passed
