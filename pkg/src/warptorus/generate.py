"""Deterministic warp-function families with curvature control.

Warps are exponentials of band-limited profiles, a = exp(s A), so positivity
is automatic and the log fields are exactly band-limited. The scale s is the
largest value in (0, base_amplitude] whose scalar curvature stays >= -1/j,
found by bisection on the discrete curvature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid import Field1D, Field2D, PeriodicGrid1D, PeriodicGrid2D
from .metric import DoublyWarpedMetric, SinglyWarpedMetric, curvature_floor

KINDS = ("doubly-sin", "doubly-multimode", "singly-sin", "singly-multimode", "singly-well")
BISECTION_STEPS = 60
SMALLEST_SCALE = 1e-12


class GenerationError(ValueError):
    """No admissible amplitude exists for the requested curvature bound."""


@dataclass(frozen=True)
class SequenceSpec:
    kind: str
    j_schedule: tuple = (10, 100, 1000)
    base_amplitude: float = 1.0
    modes: Optional[tuple] = None  # (frequency, phase, weight); frequency int or (kx, ky)
    seed: int = 0
    amplitude_mode: str = "bisect"  # or "fixed": use base_amplitude and reject violations
    n_random_modes: int = 3
    max_frequency: int = 2
    well_depth: float = 0.9
    well_radius: float = 0.1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        js = tuple(self.j_schedule)
        if not js or any(j <= 0 for j in js) or any(b <= a for a, b in zip(js, js[1:])):
            raise ValueError("j_schedule must be non-empty, positive and strictly increasing")
        object.__setattr__(self, "j_schedule", js)
        if self.base_amplitude < 0:
            raise ValueError("base_amplitude must be >= 0")
        if self.amplitude_mode not in ("bisect", "fixed"):
            raise ValueError("amplitude_mode must be 'bisect' or 'fixed'")
        if self.modes is not None:
            object.__setattr__(self, "modes", tuple(_normalise_mode(m, self.is_singly) for m in self.modes))

    @property
    def is_singly(self) -> bool:
        return self.kind.startswith("singly")


def _normalise_mode(mode, two_d: bool):
    freq, phase, weight = mode
    if two_d:
        k = (freq, 0) if np.isscalar(freq) else tuple(freq)
        if len(k) != 2 or any(float(c) != int(c) for c in k):
            raise ValueError(f"2-D mode frequency must be an integer pair, got {freq!r}")
        k = (int(k[0]), int(k[1]))
    else:
        if not np.isscalar(freq) or float(freq) != int(freq):
            raise ValueError(f"mode frequency must be an integer, got {freq!r}")
        k = int(freq)
    return (k, float(phase), float(weight))


@dataclass(frozen=True)
class BandLimited:
    """sum of weight * sin(k . x + phase) over the modes."""

    modes: tuple = field(default_factory=tuple)

    def __call__(self, *coords):
        out = np.zeros(np.broadcast(*coords).shape)
        for k, phase, w in self.modes:
            ks = (k,) if np.isscalar(k) else k
            arg = sum(kc * c for kc, c in zip(ks, coords)) + phase
            out = out + w * np.sin(arg)
        return out

    def negated(self) -> "BandLimited":
        return BandLimited(tuple((k, p, -w) for k, p, w in self.modes))


def _random_modes_1d(rng, count: int, kmax: int):
    out = []
    for _ in range(count):
        k = int(rng.integers(1, kmax + 1))
        out.append((k, float(rng.uniform(0, 2 * np.pi)), float(rng.normal()) / k**2))
    return out


def _random_modes_2d(rng, count: int, kmax: int):
    out = []
    while len(out) < count:
        k = (int(rng.integers(-kmax, kmax + 1)), int(rng.integers(-kmax, kmax + 1)))
        if k == (0, 0):
            continue
        out.append((k, float(rng.uniform(0, 2 * np.pi)), float(rng.normal()) / (k[0] ** 2 + k[1] ** 2)))
    return out


def profiles(spec: SequenceSpec) -> tuple[BandLimited, ...]:
    """Unit-scale log profiles: (A, B) for doubly kinds, (F,) for singly kinds."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "doubly-sin":
        A = BandLimited(spec.modes if spec.modes is not None else ((1, 0.0, 1.0),))
        return A, A.negated()
    if spec.kind == "doubly-multimode":
        base = list(spec.modes or ())
        A = BandLimited(tuple(base + _random_modes_1d(rng, spec.n_random_modes, spec.max_frequency)))
        B = BandLimited(tuple(_random_modes_1d(rng, spec.n_random_modes, spec.max_frequency)))
        return A, B
    if spec.kind == "singly-sin":
        return (BandLimited(spec.modes if spec.modes is not None else (((1, 0), 0.0, 1.0),)),)
    if spec.kind == "singly-multimode":
        base = list(spec.modes or ())
        return (BandLimited(tuple(base + _random_modes_2d(rng, spec.n_random_modes, spec.max_frequency))),)
    raise ValueError(f"kind {spec.kind!r} has no band-limited profile")


def _roundoff_allowance(grid) -> float:
    h = grid.h if isinstance(grid, PeriodicGrid1D) else min(grid.hx, grid.hy)
    return 200.0 * (64.0 / 12.0) * np.finfo(float).eps / h**2


@dataclass(frozen=True, eq=False)
class Generated:
    metric: object
    amplitude: float
    j: float


def _doubly_at(grid, A, B, s) -> DoublyWarpedMetric:
    z = grid.nodes
    return DoublyWarpedMetric(
        Field1D(grid, np.exp(s * A(z)), positive=True),
        Field1D(grid, np.exp(s * B(z)), positive=True),
    )


def _singly_at(grid, F, s) -> SinglyWarpedMetric:
    X, Y = grid.mesh()
    return SinglyWarpedMetric(Field2D(grid, np.exp(s * F(X, Y)), positive=True))


def _fit_scale(build, j, base: float, mode: str, allowance: float) -> float:
    floor = -(0.0 if np.isinf(j) else 1.0 / j) - allowance

    def ok(s):
        return curvature_floor(build(s)) >= floor

    if base == 0.0:
        return 0.0
    if mode == "fixed":
        if not ok(base):
            r = curvature_floor(build(base))
            raise GenerationError(
                f"base amplitude {base} gives curvature floor {r:.6g} < -1/j = {-1.0 / j:.6g}"
            )
        return base
    if ok(base):
        return base
    if not ok(SMALLEST_SCALE):
        r = curvature_floor(build(SMALLEST_SCALE))
        raise GenerationError(f"curvature floor {r:.6g} violates -1/j even at scale {SMALLEST_SCALE}")
    lo, hi = SMALLEST_SCALE, base
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def generate_member(spec: SequenceSpec, j, n1d: int = 128, n2d: int = 64) -> Generated:
    if spec.kind == "singly-well":
        return Generated(make_adversarial_well(spec.well_depth, spec.well_radius, j, n2d), spec.well_depth, j)
    if spec.is_singly:
        grid = PeriodicGrid2D(n2d, n2d)
        (F,) = profiles(spec)
        build = lambda s: _singly_at(grid, F, s)  # noqa: E731
    else:
        grid = PeriodicGrid1D(n1d)
        A, B = profiles(spec)
        build = lambda s: _doubly_at(grid, A, B, s)  # noqa: E731
    s = _fit_scale(build, j, spec.base_amplitude, spec.amplitude_mode, _roundoff_allowance(grid))
    return Generated(build(s), s, j)


def make_doubly(spec: SequenceSpec, j, n: int = 128) -> DoublyWarpedMetric:
    if spec.is_singly:
        raise ValueError(f"{spec.kind} is not a doubly warped family")
    return generate_member(spec, j, n1d=n).metric


def make_singly(spec: SequenceSpec, j, n: int = 64) -> SinglyWarpedMetric:
    if not spec.is_singly:
        raise ValueError(f"{spec.kind} is not a singly warped family")
    return generate_member(spec, j, n2d=n).metric


def bump(s: np.ndarray) -> np.ndarray:
    """Smooth compactly supported bump on s = r^2/radius^2: e^(1 - 1/(1 - s)) for s < 1, 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
    return out


def make_adversarial_well(depth: float, radius: float, j=None, n: int = 64) -> SinglyWarpedMetric:
    """f = exp(-depth * bump(r^2 / radius^2)) centred at the origin; no curvature control."""
    if not 0.0 < depth < 1.0:
        raise ValueError("depth must lie in (0, 1)")
    if not 0.0 < radius < np.pi / 4:
        raise ValueError("radius must lie in (0, pi/4)")
    grid = PeriodicGrid2D(n, n)
    X, Y = grid.mesh()
    f = np.exp(-depth * bump((X**2 + Y**2) / radius**2))
    return SinglyWarpedMetric(Field2D(grid, f, positive=True))


def sequence(spec: SequenceSpec, n1d: int = 128, n2d: int = 64) -> list[Generated]:
    return [generate_member(spec, j, n1d, n2d) for j in spec.j_schedule]
