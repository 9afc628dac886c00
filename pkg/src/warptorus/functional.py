"""Global geometric quantities: volume, foliation areas, lattice distances.

Distances come from shortest paths on a periodic L x L x L lattice whose
edges are straight coordinate segments. Edge lengths are integrated with
2-point Gauss quadrature, the warp fields being linearly interpolated from
their own grid. Graph distances are upper bounds for the true distances up
to quadrature error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .grid import TORUS_AREA, TWO_PI, interp_periodic_1d, interp_periodic_2d
from .metric import DoublyWarpedMetric, SinglyWarpedMetric

GAUSS_T = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
MIN_LATTICE = 8
SWEEP_CHUNK = 16


# -- volume and foliation areas ----------------------------------------------

def volume_doubly(m: DoublyWarpedMetric) -> float:
    return float(TORUS_AREA * m.grid.h * np.sum(m.a.values * m.b.values))


def volume_singly(m: SinglyWarpedMetric) -> float:
    return float(TWO_PI * m.grid.cell_area * np.sum(m.f.values))


def foliation_areas_doubly(m: DoublyWarpedMetric) -> tuple[float, float, float]:
    """Areas of the coordinate tori {z = z0} (minimised over z0), {x = x0}, {y = y0}."""
    h = m.grid.h
    a, b = m.a.values, m.b.values
    return (
        float(TORUS_AREA * np.min(a * b)),
        float(TWO_PI * h * np.sum(b)),
        float(TWO_PI * h * np.sum(a)),
    )


def foliation_areas_singly(m: SinglyWarpedMetric) -> tuple[float, float, float]:
    """(integral of f over T^2, min over x0 of the {x = x0} area, min over y0 of the {y = y0} area).

    The {z = z0} leaves all have area 4 pi^2.
    """
    g = m.grid
    f = m.f.values
    x_slices = TWO_PI * g.hy * f.sum(axis=1)
    y_slices = TWO_PI * g.hx * f.sum(axis=0)
    return (
        float(g.cell_area * f.sum()),
        float(x_slices.min()),
        float(y_slices.min()),
    )


def volume(m) -> float:
    return volume_doubly(m) if isinstance(m, DoublyWarpedMetric) else volume_singly(m)


# -- lattice -----------------------------------------------------------------

def stencil_offsets() -> np.ndarray:
    """The 74 lattice offsets: the 26 unit moves plus every move with exactly
    one component of magnitude 2 and the others in {-1, 0, 1}, not both zero."""
    out = []
    for o in itertools.product(range(-2, 3), repeat=3):
        mags = [abs(c) for c in o]
        if o == (0, 0, 0) or gcd(gcd(mags[0], mags[1]), mags[2]) != 1:
            continue
        if sum(c == 2 for c in mags) > 1:
            continue
        out.append(o)
    return np.array(out, dtype=np.int64)


def half_stencil() -> np.ndarray:
    offs = stencil_offsets()
    keep = [o for o in offs if tuple(o) > (0, 0, 0)]
    return np.array(keep, dtype=np.int64)


def _check_lattice(L: int) -> None:
    if not isinstance(L, (int, np.integer)) or L < MIN_LATTICE or L % 2:
        raise ValueError(f"lattice size must be an even integer >= {MIN_LATTICE}, got {L!r}")


def _edge_lengths(metric, L: int, offset: np.ndarray) -> np.ndarray:
    """Lengths of the edges (node, node + offset), broadcastable to (L, L, L)."""
    hL = TWO_PI / L
    ox, oy, oz = (float(c) for c in offset)
    coords = -np.pi + hL * np.arange(L)
    total = 0.0
    if isinstance(metric, DoublyWarpedMetric):
        for t in GAUSS_T:
            zg = coords + t * oz * hL
            ag = interp_periodic_1d(metric.a.values, zg)
            bg = interp_periodic_1d(metric.b.values, zg)
            total = total + 0.5 * np.sqrt((ag * ox) ** 2 + (bg * oy) ** 2 + oz * oz)
        return (hL * total)[None, None, :]
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    for t in GAUSS_T:
        fg = interp_periodic_2d(metric.f.values, X + t * ox * hL, Y + t * oy * hL)
        total = total + 0.5 * np.sqrt(ox * ox + oy * oy + (fg * oz) ** 2)
    return (hL * total)[:, :, None]


def build_lattice_graph(metric, L: int) -> sp.csr_matrix:
    """Symmetric sparse adjacency of the periodic lattice with the 74-neighbour stencil."""
    _check_lattice(L)
    idx = np.arange(L**3).reshape(L, L, L)
    rows, cols, weights = [], [], []
    for o in half_stencil():
        nb = np.roll(idx, shift=tuple(-o), axis=(0, 1, 2))
        w = np.broadcast_to(_edge_lengths(metric, L, o), (L, L, L)).ravel()
        rows += [idx.ravel(), nb.ravel()]
        cols += [nb.ravel(), idx.ravel()]
        weights += [w, w]
    n = L**3
    return sp.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )


def node_index(point: Sequence[float], L: int) -> int:
    """Flat lattice index of a coordinate triple; rejects points off the lattice."""
    hL = TWO_PI / L
    ijk = []
    for c in point:
        s = (float(c) + np.pi) / hL
        r = round(s)
        if abs(s - r) > 1e-9:
            raise ValueError(f"point {tuple(point)} is not a node of the {L}^3 lattice")
        ijk.append(int(r) % L)
    i, j, k = ijk
    return (i * L + j) * L + k


def node_coords(index: int, L: int) -> tuple[float, float, float]:
    i, rem = divmod(int(index), L * L)
    j, k = divmod(rem, L)
    hL = TWO_PI / L
    return (-np.pi + i * hL, -np.pi + j * hL, -np.pi + k * hL)


def geodesic_distance(metric, p, q, resolution: int) -> float:
    """Lattice shortest-path distance between two lattice nodes."""
    L = resolution
    ip, iq = node_index(p, L), node_index(q, L)
    if ip == iq:
        return 0.0
    src, dst = min(ip, iq), max(ip, iq)
    d = dijkstra(build_lattice_graph(metric, L), directed=True, indices=src)
    return float(d[dst])


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    points: tuple
    distances: np.ndarray

    def triangle_defect(self) -> float:
        """max over (i, j, k) of d(i, k) - d(i, j) - d(j, k); <= 0 for a metric."""
        D = self.distances
        return float(np.max(D[:, None, :] - D[:, :, None] - D[None, :, :]))


def distance_matrix(metric, points, resolution: int) -> DistanceMatrix:
    L = resolution
    idx = [node_index(p, L) for p in points]
    G = build_lattice_graph(metric, L)
    D = dijkstra(G, directed=True, indices=idx)[:, idx]
    D = np.minimum(D, D.T)  # identical paths, guards last-bit summation order
    np.fill_diagonal(D, 0.0)
    return DistanceMatrix(tuple(tuple(p) for p in points), D)


# -- sources and sweeps --------------------------------------------------------

@dataclass(frozen=True)
class SampleSpec:
    """Lattice size and source thinning for the symmetry-reduced sweeps.

    source_stride applies to the singly warped case, whose sources are
    (x_i, y_j, 0); None picks L // 16 so that 256 columns are swept.
    """

    resolution: int = 32
    source_stride: Optional[int] = None

    def stride(self, metric) -> int:
        if isinstance(metric, DoublyWarpedMetric):
            return 1
        if self.source_stride is None:
            return max(1, self.resolution // 16)
        return max(1, int(self.source_stride))


def source_nodes(metric, L: int, stride: int = 1) -> np.ndarray:
    """Doubly: (0, 0, z_k) by translation symmetry in x, y. Singly: (x_i, y_j, 0) by symmetry in z."""
    if isinstance(metric, DoublyWarpedMetric):
        i0 = L // 2  # x = 0
        return np.array([(i0 * L + i0) * L + k for k in range(L)], dtype=np.int64)
    k0 = L // 2  # z = 0
    ii = range(0, L, stride)
    return np.array([(i * L + j) * L + k0 for i in ii for j in ii], dtype=np.int64)


def source_gap(metric, L: int, stride: int) -> float:
    """Upper bound on the lattice distance from any node to the nearest source orbit."""
    if isinstance(metric, DoublyWarpedMetric) or stride == 1:
        return 0.0
    return float((stride // 2) * np.sqrt(2.0) * TWO_PI / L)


def flat_distance(a_inf: float, b_inf: float, p, q, c_inf: float = 1.0):
    """Distance on the flat torus a^2 dx^2 + b^2 dy^2 + c^2 dz^2 with wrapped displacements.

    p and q may be arrays of shape (..., 3).
    """
    if not (a_inf > 0 and b_inf > 0 and c_inf > 0):
        raise ValueError("flat torus scales must be positive")
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    d = np.abs((d + np.pi) % TWO_PI - np.pi)
    scale = np.array([a_inf, b_inf, c_inf])
    out = np.sqrt(np.sum((d * scale) ** 2, axis=-1))
    return float(out) if out.ndim == 0 else out


def limit_metric(metric, scales) -> object:
    """Constant-warp metric on the same grid: (a_inf, b_inf) or (f_inf,)."""
    if isinstance(metric, DoublyWarpedMetric):
        a_inf, b_inf = scales
        return DoublyWarpedMetric.constant(metric.grid, a_inf, b_inf)
    (f_inf,) = scales
    return SinglyWarpedMetric.constant(metric.grid, f_inf)


def _flat_scales(metric, scales) -> tuple[float, float, float]:
    if isinstance(metric, DoublyWarpedMetric):
        return float(scales[0]), float(scales[1]), 1.0
    return 1.0, 1.0, float(scales[0])


@dataclass
class SweepResult:
    lattice: int
    n_sources: int
    diameter: float
    d_unif: Optional[float] = None
    d_unif_closed_form: Optional[float] = None


def _sweep(metric, L: int, stride: int, scales=None) -> SweepResult:
    G = build_lattice_graph(metric, L)
    sources = source_nodes(metric, L, stride)
    ref0 = None
    if scales is not None:
        Gref = build_lattice_graph(limit_metric(metric, scales), L)
        ref0 = dijkstra(Gref, directed=True, indices=0).reshape(L, L, L)
        hL = TWO_PI / L
        coords = -np.pi + hL * np.arange(L)
        grid_pts = np.stack(np.meshgrid(coords, coords, coords, indexing="ij"), axis=-1)
        fs = _flat_scales(metric, scales)
    diam = 0.0
    dunif = 0.0
    dclosed = 0.0
    for start in range(0, len(sources), SWEEP_CHUNK):
        chunk = sources[start : start + SWEEP_CHUNK]
        D = dijkstra(G, directed=True, indices=chunk)
        diam = max(diam, float(D.max()))
        if ref0 is None:
            continue
        for row, s in zip(D, chunk):
            i, rem = divmod(int(s), L * L)
            j, k = divmod(rem, L)
            # constant metric is translation invariant: shift the sweep from node 0
            ref = np.roll(ref0, shift=(i, j, k), axis=(0, 1, 2)).ravel()
            dunif = max(dunif, float(np.max(np.abs(row - ref))))
            exact = flat_distance(*fs[:2], grid_pts[i, j, k], grid_pts, c_inf=fs[2]).ravel()
            dclosed = max(dclosed, float(np.max(np.abs(row - exact))))
    res = SweepResult(L, len(sources), diam)
    if ref0 is not None:
        res.d_unif = dunif
        res.d_unif_closed_form = dclosed
    return res


@dataclass
class DistanceSummary:
    diameter: float
    diameter_err: float
    d_unif: Optional[float] = None
    d_unif_err: Optional[float] = None
    d_unif_closed_form: Optional[float] = None
    lattice: int = 0
    n_sources: int = 0
    coarse: Optional[SweepResult] = field(default=None, repr=False)


def distance_summary(metric, sample: SampleSpec = SampleSpec(), scales=None) -> DistanceSummary:
    """Diameter with error estimate, plus d_unif to the flat limit when scales are given.

    The error estimate is |value(L) - value(L/2)| plus, for thinned sources,
    the distance from any node to the nearest swept column.
    """
    L = sample.resolution
    _check_lattice(L)
    if L // 2 < MIN_LATTICE or (L // 2) % 2:
        raise ValueError(f"lattice {L} too small for a refinement estimate (need L/2 even and >= {MIN_LATTICE})")
    stride = sample.stride(metric)
    fine = _sweep(metric, L, stride, scales)
    coarse_stride = max(1, (stride + 1) // 2)  # same physical source spacing, rounded up
    coarse = _sweep(metric, L // 2, coarse_stride, scales)
    gap = source_gap(metric, L, stride)
    summary = DistanceSummary(
        diameter=fine.diameter,
        diameter_err=abs(fine.diameter - coarse.diameter) + gap,
        lattice=L,
        n_sources=fine.n_sources,
        coarse=coarse,
    )
    if scales is not None:
        summary.d_unif = fine.d_unif
        summary.d_unif_closed_form = fine.d_unif_closed_form
        summary.d_unif_err = abs(fine.d_unif - coarse.d_unif) + 2.0 * gap
    return summary


def diameter(metric, resolution: int = 32, source_stride: Optional[int] = None) -> tuple[float, float]:
    s = distance_summary(metric, SampleSpec(resolution, source_stride))
    return s.diameter, s.diameter_err


def uniform_distance(metric, scales, sample: SampleSpec = SampleSpec()) -> float:
    """sup over swept pairs of |d_metric - d_flat| with both distances from the same lattice.

    scales is (a_inf, b_inf) for doubly warped metrics and (f_inf,) for singly
    warped ones.
    """
    L = sample.resolution
    _check_lattice(L)
    return float(_sweep(metric, L, sample.stride(metric), scales).d_unif)


@dataclass(frozen=True)
class GeometricReport:
    r_min: float
    volume: float
    diameter: float
    diameter_error_est: float
    foliation_areas: tuple[float, float, float]


def geometric_report(metric, sample: SampleSpec = SampleSpec()) -> GeometricReport:
    from .metric import curvature_floor

    dist = distance_summary(metric, sample)
    areas = (
        foliation_areas_doubly(metric)
        if isinstance(metric, DoublyWarpedMetric)
        else foliation_areas_singly(metric)
    )
    return GeometricReport(curvature_floor(metric), volume(metric), dist.diameter, dist.diameter_err, areas)
