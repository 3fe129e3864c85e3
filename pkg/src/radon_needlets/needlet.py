"""Needlet frame on the disk built over product cubature grids.

Level ``j >= 0`` carries one coefficient per node of ``needlet_grid(j)``:

    beta_{j,xi} = sqrt(omega_{j,xi}) sum_k sqrt(b(k / 2^j)) sum_{l,i} f_{k,l,i}(xi) alpha_{k,l,i}

Level -1 is the scaling term and stores the degree-0 coefficient
``alpha_{0,0,1}`` directly, which keeps the frame tight with unit-norm
elements.

Because the grids are polar tensor products, every level transform is a
pair of small matrix products (radial table x angular table).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil
from typing import Callable

import numpy as np

from .cubature import NeedletGrid, needlet_grid, disk_cubature
from .svd_basis import (
    SvdCoeffs,
    basis_matrix,
    eigenvalue,
    index_arrays,
    n_indices,
    radial_matrix,
    angular_matrix,
)

# sigma_{j,xi}^2 <= NOISE_BOUND * 2^j: lambda_k^{-2} = (k+1)/(4 pi) <= 2^{j+1}/(4 pi)
# on the support of b(k/2^j), and omega * sum_k b L_k(xi, xi) = ||psi||^2 <= 1.
NOISE_BOUND = 1 / (2 * np.pi)

SUP_PATCH_POINTS = 41
SUP_PATCH_RADIUS = 8.0
SUP_INFLATION = 1.05


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def filter_a(t):
    """Smooth cut-off: 1 on [0, 1/2], 0 on [1, inf), exp(-1/u) transition."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("filter argument must be nonnegative")
    up, down = _bump(2 * (1 - t)), _bump(2 * t - 1)
    mid = (t > 0.5) & (t < 1)
    out = np.where(t <= 0.5, 1.0, 0.0)
    out[mid] = up[mid] / (up[mid] + down[mid])
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Filter:
    """Littlewood-Paley pair; ``a`` is configurable, ``b(t) = a(t/2) - a(t)``."""

    a: Callable = filter_a

    def b(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.a(t / 2)) - np.asarray(self.a(t))
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out


DEFAULT_FILTER = Filter()


def filter_b(t):
    return DEFAULT_FILTER.b(t)


def level_degrees(j: int, k_max: int) -> range:
    """Degrees k with b(k / 2^j) possibly nonzero."""
    return range(ceil(2.0 ** (j - 1)), min(2 ** (j + 1), k_max))


@dataclass(frozen=True)
class LevelOperator:
    grid: NeedletGrid
    sel: np.ndarray  # positions in the coefficient vector
    sqrt_b: np.ndarray
    radial: np.ndarray  # (m, len(sel))
    angular: np.ndarray  # (M, len(sel))

    @property
    def sqrt_w(self) -> np.ndarray:
        return np.sqrt(self.grid.cubature.node_weights)

    def analyze(self, alpha: np.ndarray) -> np.ndarray:
        c = self.sqrt_b * alpha[self.sel]
        vals = (self.radial * c) @ self.angular.T
        return (self.sqrt_w[:, None] * vals).ravel()

    def synthesize(self, beta: np.ndarray) -> np.ndarray:
        m, M = self.radial.shape[0], self.angular.shape[0]
        h = self.sqrt_w[:, None] * beta.reshape(m, M)
        return self.sqrt_b * np.einsum("an,an->n", self.radial, h @ self.angular)

    def node_basis(self) -> np.ndarray:
        """f_n(xi) for every node (rows) and selected index (columns)."""
        m, M = self.radial.shape[0], self.angular.shape[0]
        return (self.radial[:, None, :] * self.angular[None, :, :]).reshape(m * M, -1)


@dataclass(frozen=True)
class NeedletFrame:
    J: int
    rotation: float
    filt: Filter
    levels: tuple[LevelOperator, ...]

    @property
    def k_max(self) -> int:
        return 2**self.J

    @property
    def grids(self) -> list[NeedletGrid]:
        return [op.grid for op in self.levels]


@lru_cache(maxsize=32)
def needlet_frame(J: int, rotation: float = 0.0, filt: Filter = DEFAULT_FILTER) -> NeedletFrame:
    """Levels 0..J-1 acting on coefficient vectors with ``k < 2^J``."""
    if J < 0:
        raise ValueError("J must be nonnegative")
    k_top = 2**J
    ks, _, _ = index_arrays(k_top)
    ops = []
    for j in range(J):
        grid = needlet_grid(j, rotation)
        degs = level_degrees(j, k_top)
        k_hi = degs.stop
        sel = np.flatnonzero((ks >= degs.start) & (ks < k_hi))
        sqrt_b = np.sqrt(filt.b(ks[sel] / 2.0**j))
        cub = grid.cubature
        R = radial_matrix(k_hi, cub.radii)[:, sel]
        A = angular_matrix(k_hi, cub.angles)[:, sel]
        ops.append(LevelOperator(grid, sel, sqrt_b, R, A))
    return NeedletFrame(J, rotation, filt, tuple(ops))


@dataclass
class NeedletCoeffs:
    """Scaling coefficient plus one flat array per level j = 0..J-1."""

    scaling: float
    levels: list[np.ndarray]
    grids: list[NeedletGrid] = field(repr=False)
    rotation: float = 0.0
    filt: Filter = field(default=DEFAULT_FILTER, repr=False)

    def __post_init__(self):
        if len(self.levels) != len(self.grids):
            raise ValueError("one value array per grid required")
        for v, g in zip(self.levels, self.grids):
            if v.shape != (g.size,):
                raise ValueError(f"level {g.level}: expected {g.size} values, got {v.shape}")
            if not np.all(np.isfinite(v)):
                raise ValueError("needlet coefficients must be finite")
        if not np.isfinite(self.scaling):
            raise ValueError("scaling coefficient must be finite")

    @property
    def J(self) -> int:
        return len(self.levels)

    def replace_levels(self, levels: list[np.ndarray], scaling: float | None = None) -> "NeedletCoeffs":
        return NeedletCoeffs(
            self.scaling if scaling is None else scaling, levels, self.grids, self.rotation, self.filt
        )

    def kept_count(self) -> int:
        return int(sum(np.count_nonzero(v) for v in self.levels))

    def energy(self) -> float:
        return float(self.scaling**2 + sum(np.dot(v, v) for v in self.levels))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "node_index", "xi_x", "xi_y", "value"])
        w.writerow([-1, 0, repr(0.0), repr(0.0), repr(float(self.scaling))])
        for g, vals in zip(self.grids, self.levels):
            xs, ys = g.cubature.x, g.cubature.y
            for n, v in enumerate(vals):
                w.writerow([g.level, n, repr(float(xs[n])), repr(float(ys[n])), repr(float(v))])
        return buf.getvalue()


def _frame_for(J: int, rotation: float, filt: Filter | None) -> NeedletFrame:
    return needlet_frame(J, float(rotation), filt or DEFAULT_FILTER)


def analysis(alpha: SvdCoeffs, J: int, rotation: float = 0.0, filt: Filter | None = None) -> NeedletCoeffs:
    """Needlet coefficients of the function with SVD coefficients ``alpha``."""
    if alpha.k_max < 2**J:
        raise ValueError(f"analysis at J={J} needs k_max >= {2**J}, got {alpha.k_max}")
    frame = _frame_for(J, rotation, filt)
    vals = alpha.values[: n_indices(frame.k_max)]
    levels = [op.analyze(vals) for op in frame.levels]
    scaling = float(alpha.values[0]) if alpha.values.size else 0.0
    return NeedletCoeffs(scaling, levels, frame.grids, frame.rotation, frame.filt)


def synthesis(beta: NeedletCoeffs, k_max: int) -> SvdCoeffs:
    """Adjoint of :func:`analysis`, returned with ``k_max`` coefficients."""
    frame = _frame_for(beta.J, beta.rotation, beta.filt)
    out = np.zeros(n_indices(frame.k_max))
    for op, vals in zip(frame.levels, beta.levels):
        out[op.sel] += op.synthesize(vals)
    if out.size:
        out[0] += beta.scaling
    elif beta.scaling != 0:
        raise ValueError("J=0 frame holds no degree-0 slot")
    return SvdCoeffs(frame.k_max, out).resized(k_max)


@dataclass(frozen=True)
class NoiseProfile:
    """Standard deviation of each needlet coefficient at noise level 1."""

    scaling: float
    sigma: list[np.ndarray]

    def level_bound_ratio(self) -> list[float]:
        """max_xi sigma_{j,xi}^2 2^{-j} per level."""
        return [float(np.max(s**2) * 2.0**-j) for j, s in enumerate(self.sigma)]


@lru_cache(maxsize=32)
def _noise_profile(J: int, rotation: float, filt: Filter) -> NoiseProfile:
    frame = needlet_frame(J, rotation, filt)
    ks = index_arrays(frame.k_max)[0]
    sigma = []
    for op in frame.levels:
        amp = op.sqrt_b**2 / eigenvalue(ks[op.sel]) ** 2
        var = (op.radial**2 * amp) @ (op.angular**2).T
        var *= op.grid.cubature.node_weights[:, None]
        s = np.sqrt(var.ravel())
        s.flags.writeable = False
        sigma.append(s)
    prof = NoiseProfile(1.0 / eigenvalue(0), sigma)
    for j, ratio in enumerate(prof.level_bound_ratio()):
        if ratio > NOISE_BOUND * (1 + 1e-12):
            raise AssertionError(f"noise variance bound violated at level {j}: {ratio}")
    return prof


def noise_profile(J: int, rotation: float = 0.0, filt: Filter | None = None) -> NoiseProfile:
    """sigma_{j,xi}^2 = omega sum_k b(k/2^j) lambda_k^{-2} sum_{l,i} f_{k,l,i}(xi)^2."""
    if J < 1:
        raise ValueError("J must be at least 1")
    return _noise_profile(J, float(rotation), filt or DEFAULT_FILTER)


def _level_op(j: int, k_max: int, rotation: float, filt: Filter | None) -> LevelOperator:
    if k_max < 2 ** (j + 1):
        raise ValueError(f"level {j} needs k_max >= {2 ** (j + 1)}")
    return _frame_for(j + 1, rotation, filt).levels[j]


def needlet_eval(j: int, xi_index: int, p, k_max: int | None = None, rotation: float = 0.0,
                 filt: Filter | None = None):
    """psi_{j,xi}(p) for point(s) ``p`` (last axis of length 2)."""
    op = _level_op(j, 2 ** (j + 1) if k_max is None else k_max, rotation, filt)
    if not 0 <= xi_index < op.grid.size:
        raise IndexError(f"node index {xi_index} out of range for level {j}")
    return _psi_values(op, xi_index, p)


def _psi_values(op: LevelOperator, xi_index: int, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    M = op.angular.shape[0]
    a, q = divmod(xi_index, M)
    center = op.radial[a] * op.angular[q] * op.sqrt_b
    k_hi = 2 ** (op.grid.level + 1)
    F = basis_matrix(k_hi, p[..., 0], p[..., 1])
    # canonical ordering is prefix-stable, so frame positions are valid columns of F
    val = np.sqrt(op.grid.cubature.node_weights[a]) * (F[:, op.sel] @ center)
    return val.reshape(p.shape[:-1]) if p.ndim > 1 else (float(val[0]) if val.size == 1 else val)


def sup_patch(xi, j: int, n: int = SUP_PATCH_POINTS, radius: float = SUP_PATCH_RADIUS) -> np.ndarray:
    """Polar patch of n x n points within ``radius * 2^-j`` of ``xi``.

    Patch angles are measured from the direction of ``xi`` so the patch turns
    with the node; points falling outside the disk are pulled back radially
    onto the unit circle, where boundary maxima sit.
    """
    xi = np.asarray(xi, dtype=float)
    rho = np.linspace(0.0, radius * 2.0**-j, n)
    phi = np.arctan2(xi[1], xi[0]) + 2 * np.pi * np.arange(n) / n
    pts = xi[None, None, :] + np.stack(
        [np.outer(rho, np.cos(phi)), np.outer(rho, np.sin(phi))], axis=-1
    )
    pts = pts.reshape(-1, 2)
    r = np.hypot(pts[:, 0], pts[:, 1])
    out = r > 1.0
    pts[out] /= r[out, None]
    return pts


@lru_cache(maxsize=32)
def _sup_norms(J: int, rotation: float, filt: Filter) -> tuple[np.ndarray, ...]:
    frame = needlet_frame(J, rotation, filt)
    out = []
    for op in frame.levels:
        grid = op.grid
        M = grid.angular_count
        per_radius = np.empty(grid.radial_count)
        for a in range(grid.radial_count):
            xi_index = a * M
            xi = np.array([grid.cubature.x[xi_index], grid.cubature.y[xi_index]])
            pts = sup_patch(xi, grid.level)
            per_radius[a] = np.max(np.abs(_psi_values(op, xi_index, pts)))
        # the kernel is rotation invariant, so the sup depends on the radius only
        s = np.repeat(SUP_INFLATION * per_radius, M)
        s.flags.writeable = False
        out.append(s)
    return tuple(out)


def needlet_sup_norms(J: int, rotation: float = 0.0, filt: Filter | None = None) -> list[np.ndarray]:
    """Estimated ||psi_{j,xi}||_inf for every level below J (local patch max, inflated 5%)."""
    return list(_sup_norms(J, float(rotation), filt or DEFAULT_FILTER))


def needlet_norm(j: int, xi_index: int, p: float, degree: int | None = None,
                 rotation: float = 0.0, filt: Filter | None = None) -> float:
    """||psi_{j,xi}||_p estimated on a fine product cubature (p = inf: max over nodes and patch)."""
    op = _level_op(j, 2 ** (j + 1), rotation, filt)
    degree = degree or 2 ** (j + 4)
    cub = disk_cubature(degree)
    vals = _psi_values(op, xi_index, cub.nodes)
    if np.isinf(p):
        xi = np.array([op.grid.cubature.x[xi_index], op.grid.cubature.y[xi_index]])
        patch = _psi_values(op, xi_index, sup_patch(xi, j))
        return float(max(np.max(np.abs(vals)), np.max(np.abs(patch))))
    return float(np.dot(cub.weights, np.abs(vals) ** p) ** (1 / p))
