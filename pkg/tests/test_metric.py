import numpy as np
import pytest

from warptorus.grid import Field1D, Field2D, PeriodicGrid1D, PeriodicGrid2D
from warptorus.metric import (
    DoublyWarpedMetric,
    SinglyWarpedMetric,
    curvature_floor,
    discretization_tol,
    elliptic_residual_singly,
    log_fields,
    log_residual_doubly,
    ricci_eigenvalues_doubly,
    scalar_curvature_doubly,
    scalar_curvature_singly,
)


def doubly(fa, fb, n=128):
    g = PeriodicGrid1D(n)
    return DoublyWarpedMetric(Field1D.from_function(g, fa, True), Field1D.from_function(g, fb, True))


def singly(ff, n=64):
    return SinglyWarpedMetric(Field2D.from_function(PeriodicGrid2D(n, n), ff, True))


def one(z):
    return np.ones_like(z)


def test_flat_metrics_have_zero_curvature():
    assert np.abs(scalar_curvature_doubly(doubly(one, one)).values).max() < 1e-12
    m = singly(lambda x, y: np.ones_like(x))
    assert np.abs(scalar_curvature_singly(m).values).max() < 1e-12


def test_constant_rescaling_leaves_curvature_unchanged():
    m1 = doubly(lambda z: np.exp(0.3 * np.sin(z)), lambda z: 2 + np.cos(2 * z))
    m2 = doubly(lambda z: 5 * np.exp(0.3 * np.sin(z)), lambda z: 0.1 * (2 + np.cos(2 * z)))
    r1 = scalar_curvature_doubly(m1).values
    r2 = scalar_curvature_doubly(m2).values
    assert np.abs(r1 - r2).max() < 1e-10


def test_doubly_curvature_matches_closed_form():
    eps = 0.2
    m = doubly(lambda z: np.exp(eps * np.sin(z)), one)
    z = m.grid.nodes
    # a''/a = alpha'' + alpha'^2 with alpha = eps sin z
    exact = -2 * (-eps * np.sin(z) + eps**2 * np.cos(z) ** 2)
    assert np.abs(scalar_curvature_doubly(m).values - exact).max() < 1e-6


def test_ricci_eigenvalues_trace_to_scalar_curvature():
    m = doubly(lambda z: 1.5 + np.sin(z), lambda z: 2 + np.cos(3 * z))
    ric = ricci_eigenvalues_doubly(m)
    total = sum(r.values for r in ric)
    assert np.allclose(total, scalar_curvature_doubly(m).values, atol=1e-12)


def test_singly_curvature_matches_closed_form():
    m = singly(lambda x, y: np.exp(np.sin(x)))
    X, _ = m.grid.mesh()
    exact = -2 * (np.cos(X) ** 2 - np.sin(X))
    assert np.abs(scalar_curvature_singly(m).values - exact).max() < 1e-4


def test_log_residual_equals_minus_half_curvature():
    m = doubly(lambda z: np.exp(0.1 * np.sin(z)), lambda z: np.exp(-0.1 * np.sin(z)))
    res = log_residual_doubly(m, 10)
    assert res.identity_error < res.tolerance
    s = elliptic_residual_singly(singly(lambda x, y: np.exp(0.1 * np.cos(x + y))), 10)
    assert s.identity_error < s.tolerance


def test_residual_pass_and_fail():
    # residual of exp(eps sin z), exp(-eps sin z) is eps^2 cos^2 z, max eps^2
    eps = 0.1
    m = doubly(lambda z: np.exp(eps * np.sin(z)), lambda z: np.exp(-eps * np.sin(z)))
    assert log_residual_doubly(m, 1 / (2 * eps**2) * 0.99).passed
    assert not log_residual_doubly(m, 1 / (2 * eps**2) * 1.5).passed


def test_j_infinity_means_zero_bound():
    m = doubly(one, one)
    res = log_residual_doubly(m, np.inf)
    assert res.bound == 0.0 and res.passed


def test_j_below_one_rejected():
    with pytest.raises(ValueError):
        log_residual_doubly(doubly(one, one), 0.5)
    with pytest.raises(ValueError):
        elliptic_residual_singly(singly(lambda x, y: np.ones_like(x)), 0.0)


def test_metric_rejects_non_positive_and_mixed_grids():
    g = PeriodicGrid1D(16)
    with pytest.raises(ValueError):
        DoublyWarpedMetric(Field1D(g, np.zeros(16)), Field1D(g, np.ones(16)))
    with pytest.raises(ValueError):
        DoublyWarpedMetric(Field1D(g, np.ones(16)), Field1D(PeriodicGrid1D(32), np.ones(32)))


def test_log_fields_and_constant_constructor():
    m = DoublyWarpedMetric.constant(PeriodicGrid1D(16), 2.0, 3.0)
    lf = log_fields(m)
    assert np.allclose(lf.alpha.values, np.log(2.0))
    assert m.is_constant()
    s = SinglyWarpedMetric.constant(PeriodicGrid2D(16, 16), 0.5)
    assert np.allclose(log_fields(s).h.values, np.log(0.5))


def test_curvature_floor_and_tolerance():
    m = doubly(lambda z: np.exp(0.2 * np.sin(z)), one)
    assert curvature_floor(m) == scalar_curvature_doubly(m).values.min()
    g = PeriodicGrid1D(16)
    assert discretization_tol(g, np.zeros(3)) == 1e-10
