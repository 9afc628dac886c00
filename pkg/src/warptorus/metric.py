"""Warped-product metrics on the 3-torus and their curvature quantities.

Doubly warped:  g = a(z)^2 dx^2 + b(z)^2 dy^2 + dz^2
Singly warped:  g = dx^2 + dy^2 + f(x, y)^2 dz^2
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import (
    Field1D,
    Field2D,
    d1_periodic,
    d2_periodic,
    gradient_2d,
    laplacian_2d,
)

POSITIVITY_FLOOR = 1e-12


def _require_positive(u, name: str) -> None:
    if u.values.min() <= POSITIVITY_FLOOR:
        raise ValueError(f"warp field {name} must be > {POSITIVITY_FLOOR} everywhere")


@dataclass(frozen=True, eq=False)
class DoublyWarpedMetric:
    a: Field1D
    b: Field1D

    def __post_init__(self):
        if self.a.grid != self.b.grid:
            raise ValueError("warp fields a and b must share a grid")
        _require_positive(self.a, "a")
        _require_positive(self.b, "b")

    @property
    def grid(self):
        return self.a.grid

    @classmethod
    def constant(cls, grid, a_inf: float, b_inf: float) -> "DoublyWarpedMetric":
        return cls(
            Field1D(grid, np.full(grid.n, float(a_inf)), positive=True),
            Field1D(grid, np.full(grid.n, float(b_inf)), positive=True),
        )

    def is_constant(self) -> bool:
        return bool(np.ptp(self.a.values) == 0.0 and np.ptp(self.b.values) == 0.0)


@dataclass(frozen=True, eq=False)
class SinglyWarpedMetric:
    f: Field2D

    def __post_init__(self):
        _require_positive(self.f, "f")

    @property
    def grid(self):
        return self.f.grid

    @classmethod
    def constant(cls, grid, f_inf: float) -> "SinglyWarpedMetric":
        return cls(Field2D(grid, np.full((grid.nx, grid.ny), float(f_inf)), positive=True))

    def is_constant(self) -> bool:
        return bool(np.ptp(self.f.values) == 0.0)


@dataclass(frozen=True, eq=False)
class LogFields:
    alpha: Optional[Field1D] = None
    beta: Optional[Field1D] = None
    h: Optional[Field2D] = None


def log_fields(m) -> LogFields:
    if isinstance(m, DoublyWarpedMetric):
        return LogFields(
            alpha=m.a.with_values(np.log(m.a.values)),
            beta=m.b.with_values(np.log(m.b.values)),
        )
    return LogFields(h=m.f.with_values(np.log(m.f.values)))


def _doubly_terms(m: DoublyWarpedMetric):
    a, b = m.a.values, m.b.values
    h = m.grid.h
    a1, a2 = d1_periodic(a, h), d2_periodic(a, h)
    b1, b2 = d1_periodic(b, h), d2_periodic(b, h)
    return a2 / a, b2 / b, (a1 * b1) / (a * b)


def scalar_curvature_doubly(m: DoublyWarpedMetric) -> Field1D:
    """R = -2 (a''/a + b''/b + a'b'/(ab))."""
    ta, tb, tab = _doubly_terms(m)
    return m.a.with_values(-2.0 * (ta + tb + tab))


def ricci_eigenvalues_doubly(m: DoublyWarpedMetric) -> tuple[Field1D, Field1D, Field1D]:
    """Ricci eigenvalues along d/dx, d/dy, d/dz."""
    ta, tb, tab = _doubly_terms(m)
    return (
        m.a.with_values(-ta - tab),
        m.a.with_values(-tb - tab),
        m.a.with_values(-ta - tb),
    )


def scalar_curvature_singly(m: SinglyWarpedMetric) -> Field2D:
    """R = -2 (Laplacian f) / f with the Euclidean Laplacian."""
    lap = laplacian_2d(m.f).values
    return m.f.with_values(-2.0 * lap / m.f.values)


def discretization_tol(grid, values: np.ndarray) -> float:
    """Slack absorbing O(h^4) truncation error: 10 h^4 max|values| plus a roundoff floor."""
    h = grid.h if hasattr(grid, "h") else max(grid.hx, grid.hy)
    return 1e-10 + 10.0 * h**4 * float(np.max(np.abs(values)))


@dataclass(frozen=True, eq=False)
class ResidualCheck:
    """Outcome of a curvature-residual test against the bound 1/(2j)."""

    residual: object  # Field1D or Field2D
    passed: bool
    bound: float
    tolerance: float
    max_residual: float
    identity_error: float  # max |residual - (the direct-form residual)|

    @property
    def margin(self) -> float:
        return self.bound - self.max_residual


def _bound(j) -> float:
    return 0.0 if np.isinf(j) else 1.0 / (2.0 * j)


def log_residual_doubly(m: DoublyWarpedMetric, j) -> ResidualCheck:
    """alpha'' + beta'' + alpha'^2 + beta'^2 + alpha' beta', which equals -R/2."""
    if not j >= 1:
        raise ValueError("j must be >= 1")
    lf = log_fields(m)
    h = m.grid.h
    al, be = lf.alpha.values, lf.beta.values
    a1, a2 = d1_periodic(al, h), d2_periodic(al, h)
    b1, b2 = d1_periodic(be, h), d2_periodic(be, h)
    res = a2 + b2 + a1 * a1 + b1 * b1 + a1 * b1
    direct = -0.5 * scalar_curvature_doubly(m).values
    bound = _bound(j)
    tol = discretization_tol(m.grid, res)
    top = float(res.max())
    return ResidualCheck(
        residual=m.a.with_values(res),
        passed=top <= bound + tol,
        bound=bound,
        tolerance=tol,
        max_residual=top,
        identity_error=float(np.max(np.abs(res - direct))),
    )


def elliptic_residual_singly(m: SinglyWarpedMetric, j) -> ResidualCheck:
    """Laplacian h + |grad h|^2 with h = ln f, which equals (Laplacian f)/f."""
    if not j >= 1:
        raise ValueError("j must be >= 1")
    h = log_fields(m).h
    gx, gy = gradient_2d(h)
    res = laplacian_2d(h).values + gx.values**2 + gy.values**2
    direct = laplacian_2d(m.f).values / m.f.values
    bound = _bound(j)
    tol = discretization_tol(m.grid, res)
    top = float(res.max())
    return ResidualCheck(
        residual=m.f.with_values(res),
        passed=top <= bound + tol,
        bound=bound,
        tolerance=tol,
        max_residual=top,
        identity_error=float(np.max(np.abs(res - direct))),
    )


def curvature_floor(m) -> float:
    """Minimum of the scalar curvature over the grid."""
    if isinstance(m, DoublyWarpedMetric):
        return float(scalar_curvature_doubly(m).values.min())
    return float(scalar_curvature_singly(m).values.min())

