"""Periodic sampled fields on the circle [-pi, pi) and the torus [-pi, pi)^2.

Derivatives are 4th-order central differences with wrap-around indexing;
quadrature is the rectangle rule, which is spectrally accurate for smooth
periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi
TORUS_AREA = TWO_PI**2


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _check_nodes(n: int, label: str = "n") -> None:
    if not isinstance(n, (int, np.integer)) or n < 16 or not _is_power_of_two(int(n)):
        raise ValueError(f"{label} must be a power of two >= 16, got {n!r}")


@dataclass(frozen=True)
class PeriodicGrid1D:
    n: int

    def __post_init__(self):
        _check_nodes(self.n)

    @property
    def h(self) -> float:
        return TWO_PI / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi + self.h * np.arange(self.n)


@dataclass(frozen=True)
class PeriodicGrid2D:
    nx: int
    ny: int

    def __post_init__(self):
        _check_nodes(self.nx, "nx")
        _check_nodes(self.ny, "ny")

    @property
    def hx(self) -> float:
        return TWO_PI / self.nx

    @property
    def hy(self) -> float:
        return TWO_PI / self.ny

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def x(self) -> np.ndarray:
        return -np.pi + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -np.pi + self.hy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates with axis 0 = x and axis 1 = y."""
        return np.meshgrid(self.x, self.y, indexing="ij")


def _frozen(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"values have shape {arr.shape}, grid expects {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Field1D:
    grid: PeriodicGrid1D
    values: np.ndarray
    positive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, (self.grid.n,)))
        if self.positive and self.values.min() <= 0.0:
            raise ValueError("field flagged positive has non-positive values")

    @classmethod
    def from_function(cls, grid: PeriodicGrid1D, fn, positive: bool = False) -> "Field1D":
        return cls(grid, fn(grid.nodes), positive)

    def with_values(self, values, positive: bool = False) -> "Field1D":
        return Field1D(self.grid, values, positive)


@dataclass(frozen=True, eq=False)
class Field2D:
    grid: PeriodicGrid2D
    values: np.ndarray
    positive: bool = False

    def __post_init__(self):
        shape = (self.grid.nx, self.grid.ny)
        object.__setattr__(self, "values", _frozen(self.values, shape))
        if self.positive and self.values.min() <= 0.0:
            raise ValueError("field flagged positive has non-positive values")

    @classmethod
    def from_function(cls, grid: PeriodicGrid2D, fn, positive: bool = False) -> "Field2D":
        X, Y = grid.mesh()
        return cls(grid, fn(X, Y), positive)

    def with_values(self, values, positive: bool = False) -> "Field2D":
        return Field2D(self.grid, values, positive)


Field = Union[Field1D, Field2D]


@dataclass(frozen=True)
class AnalysisConstants:
    """Constants of the functional inequalities.

    The Poincare constants default to 1, the sharp value for a circle or square
    torus of side 2*pi. The Sobolev constant for p = 8/7 in the plane defaults to
    p(n-1)/(n-p) = 4/3.
    """

    poincare_1d: float = 1.0
    poincare_2d: float = 1.0
    sobolev_8_7: float = 4.0 / 3.0

    def __post_init__(self):
        for name in ("poincare_1d", "poincare_2d", "sobolev_8_7"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


# -- raw periodic stencils (operate on arrays, any length) -----------------

def d1_periodic(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    up1 = np.roll(u, -1, axis)
    um1 = np.roll(u, 1, axis)
    up2 = np.roll(u, -2, axis)
    um2 = np.roll(u, 2, axis)
    return (8.0 * (up1 - um1) - (up2 - um2)) / (12.0 * h)


def d2_periodic(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    # grouped as symmetric differences so constants map to exactly zero
    s1 = np.roll(u, -1, axis) + np.roll(u, 1, axis) - 2.0 * u
    s2 = np.roll(u, -2, axis) + np.roll(u, 2, axis) - 2.0 * u
    return (16.0 * s1 - s2) / (12.0 * h * h)


# -- field operations --------------------------------------------------------

def derivative_1d(u: Field1D, order: int = 1) -> Field1D:
    if order == 1:
        return u.with_values(d1_periodic(u.values, u.grid.h))
    if order == 2:
        return u.with_values(d2_periodic(u.values, u.grid.h))
    raise ValueError(f"order must be 1 or 2, got {order!r}")


def gradient_2d(u: Field2D) -> tuple[Field2D, Field2D]:
    g = u.grid
    return (
        u.with_values(d1_periodic(u.values, g.hx, axis=0)),
        u.with_values(d1_periodic(u.values, g.hy, axis=1)),
    )


def laplacian_2d(u: Field2D) -> Field2D:
    g = u.grid
    lap = d2_periodic(u.values, g.hx, axis=0) + d2_periodic(u.values, g.hy, axis=1)
    return u.with_values(lap)


def _cell(grid) -> float:
    return grid.h if isinstance(grid, PeriodicGrid1D) else grid.cell_area


def integrate(u: Field) -> float:
    return float(_cell(u.grid) * np.sum(u.values))


def mean(u: Field) -> float:
    return integrate(u) / (TWO_PI if isinstance(u, Field1D) else TORUS_AREA)


def gradient_energy(u: Field) -> float:
    """Integral of |grad u|^2."""
    if isinstance(u, Field1D):
        du = derivative_1d(u, 1).values
        return float(u.grid.h * np.sum(du * du))
    gx, gy = gradient_2d(u)
    return float(u.grid.cell_area * np.sum(gx.values**2 + gy.values**2))


def norm_l2(u: Field) -> float:
    return float(np.sqrt(_cell(u.grid) * np.sum(u.values**2)))


def norm_w12(u: Field) -> float:
    return float(np.sqrt(norm_l2(u) ** 2 + gradient_energy(u)))


def holder_half_seminorm(u: Field1D) -> float:
    """Max over node pairs of |u(z1) - u(z2)| / d(z1, z2)^(1/2), d the wrapped distance."""
    v = u.values
    n = v.size
    best = 0.0
    for shift in range(1, n // 2 + 1):
        diff = np.abs(v - np.roll(v, -shift)).max()
        best = max(best, diff / np.sqrt(shift * u.grid.h))
    return float(best)


def richardson_estimate(quantity, u: Field) -> float:
    """|q(u) - q(u on the grid with every other node)|, a conservative error bar.

    For a 4th-order scheme the coarse error is ~16x the fine one, so the
    difference overestimates the fine-grid error.
    """
    fine = quantity(u)
    coarse = quantity(coarsen(u))
    return float(abs(fine - coarse))


def coarsen(u: Field) -> Field:
    if isinstance(u, Field1D):
        return Field1D(_coarse_grid1(u.grid), u.values[::2])
    g = u.grid
    return Field2D(_coarse_grid2(g), u.values[::2, ::2])


class _LooseGrid1D(PeriodicGrid1D):
    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError("coarse grid too small")


class _LooseGrid2D(PeriodicGrid2D):
    def __post_init__(self):
        if min(self.nx, self.ny) < 4:
            raise ValueError("coarse grid too small")


def _coarse_grid1(g: PeriodicGrid1D) -> PeriodicGrid1D:
    return _LooseGrid1D(g.n // 2)


def _coarse_grid2(g: PeriodicGrid2D) -> PeriodicGrid2D:
    return _LooseGrid2D(g.nx // 2, g.ny // 2)


def interp_periodic_1d(values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Linear interpolation of node values at arbitrary coordinates."""
    n = values.size
    s = (np.asarray(pts) + np.pi) * (n / TWO_PI)
    i0 = np.floor(s)
    t = s - i0
    i0 = i0.astype(np.int64) % n
    return (1.0 - t) * values[i0] + t * values[(i0 + 1) % n]


def interp_periodic_2d(values: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of node values (axis 0 = x) at arbitrary coordinates."""
    nx, ny = values.shape
    sx = (np.asarray(xs) + np.pi) * (nx / TWO_PI)
    sy = (np.asarray(ys) + np.pi) * (ny / TWO_PI)
    ix = np.floor(sx)
    iy = np.floor(sy)
    tx = sx - ix
    ty = sy - iy
    ix = ix.astype(np.int64) % nx
    iy = iy.astype(np.int64) % ny
    jx = (ix + 1) % nx
    jy = (iy + 1) % ny
    return (
        (1 - tx) * (1 - ty) * values[ix, iy]
        + tx * (1 - ty) * values[jx, iy]
        + (1 - tx) * ty * values[ix, jy]
        + tx * ty * values[jx, jy]
    )
