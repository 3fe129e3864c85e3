"""Phantoms, their Radon profiles and SVD coefficients, and the noisy observation model.

Observation noise is drawn from a counter-based generator so that every
coefficient's draw depends only on ``(seed, position)``:

* Philox-4x64 (numpy ``Philox``) keyed by the seed yields one raw 64-bit word
  per coefficient position, in canonical index order;
* the top 53 bits give ``u = (w >> 11 + 0.5) / 2^53`` in (0, 1);
* the standard normal variate is ``ndtri(u)`` (inverse normal CDF).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .cubature import disk_cubature, DEFAULT_MAX_NODES
from .svd_basis import (
    SvdCoeffs,
    eigenvalue,
    index_arrays,
    product_grid_project,
    project_points,
    synthesize,
)


@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    axes: tuple[float, float]
    angle: float  # radians
    intensity: float

    def contains(self, x, y):
        c, s = np.cos(self.angle), np.sin(self.angle)
        dx, dy = np.asarray(x) - self.center[0], np.asarray(y) - self.center[1]
        u = (c * dx + s * dy) / self.axes[0]
        v = (-s * dx + c * dy) / self.axes[1]
        return u * u + v * v <= 1.0

    def inside_disk(self) -> bool:
        t = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
        x, y = self.map_from_disk(np.cos(t), np.sin(t))
        return bool(np.max(x * x + y * y) <= 1.0)

    def map_from_disk(self, u, v):
        """Affine image of unit-disk points; Jacobian is axes[0] * axes[1]."""
        c, s = np.cos(self.angle), np.sin(self.angle)
        a, b = self.axes[0] * np.asarray(u), self.axes[1] * np.asarray(v)
        return self.center[0] + c * a - s * b, self.center[1] + s * a + c * b

    def chord(self, theta, s):
        """Length of the line {<y, e_theta> = s} inside the ellipse."""
        theta = np.asarray(theta, dtype=float)
        s = np.asarray(s, dtype=float)
        A, B = self.axes
        shift = s - (self.center[0] * np.cos(theta) + self.center[1] * np.sin(theta))
        rel = theta - self.angle
        a2 = (A * np.cos(rel)) ** 2 + (B * np.sin(rel)) ** 2
        disc = np.clip(a2 - shift * shift, 0.0, None)
        return 2 * A * B * np.sqrt(disc) / a2


@dataclass(frozen=True)
class Phantom:
    name: str
    density_fn: Callable = field(repr=False)
    ellipses: tuple[Ellipse, ...] | None = None

    def density(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        inside = x * x + y * y <= 1.0
        return np.where(inside, self.density_fn(x, y), 0.0)


def ellipse_phantom(name: str, ellipses) -> Phantom:
    ellipses = tuple(ellipses)

    def dens(x, y):
        out = np.zeros(np.broadcast(x, y).shape)
        for e in ellipses:
            out = out + e.intensity * e.contains(x, y)
        return out

    return Phantom(name, dens, ellipses)


# Shepp & Logan (1974) original table: center, semi-axes, rotation (degrees), intensity.
SHEPP_LOGAN_TABLE = (
    ((0.0, 0.0), (0.69, 0.92), 0.0, 2.0),
    ((0.0, -0.0184), (0.6624, 0.874), 0.0, -0.98),
    ((0.22, 0.0), (0.11, 0.31), -18.0, -0.02),
    ((-0.22, 0.0), (0.16, 0.41), 18.0, -0.02),
    ((0.0, 0.35), (0.21, 0.25), 0.0, 0.01),
    ((0.0, 0.1), (0.046, 0.046), 0.0, 0.01),
    ((0.0, -0.1), (0.046, 0.046), 0.0, 0.01),
    ((-0.08, -0.605), (0.046, 0.023), 0.0, 0.01),
    ((0.0, -0.606), (0.023, 0.023), 0.0, 0.01),
    ((0.06, -0.605), (0.023, 0.046), 0.0, 0.01),
)


def shepp_logan() -> Phantom:
    """Original 10-ellipse Shepp-Logan head; its extent (0.92) already fits the disk."""
    return ellipse_phantom(
        "shepp_logan",
        (Ellipse(c, ax, np.deg2rad(ang), inten) for c, ax, ang, inten in SHEPP_LOGAN_TABLE),
    )


def disk_phantom(intensity: float = 1.0) -> Phantom:
    return ellipse_phantom("disk", [Ellipse((0.0, 0.0), (1.0, 1.0), 0.0, intensity)])


def polynomial_phantom(coeffs: SvdCoeffs, name: str = "polynomial") -> Phantom:
    """Band-limited phantom sum_n c_n f_n."""
    def dens(x, y):
        x, y = np.broadcast_arrays(x, y)
        r = np.hypot(x, y)
        ok = r <= 1.0
        out = np.zeros(x.shape)
        out[ok] = synthesize(coeffs, x[ok], y[ok])
        return out

    return Phantom(name, dens)


PHANTOMS = {"shepp_logan": shepp_logan, "disk": disk_phantom}


def get_phantom(name: str) -> Phantom:
    try:
        return PHANTOMS[name]()
    except KeyError:
        raise ValueError(f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}") from None


def radon_analytic(ph: Phantom, theta, s):
    """Closed-form Radon transform of an ellipse phantom."""
    if ph.ellipses is None:
        raise ValueError(f"phantom {ph.name!r} has no ellipse description")
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1):
        raise ValueError("offset s must lie in [-1, 1]")
    out = sum(e.intensity * e.chord(theta, s) for e in ph.ellipses)
    return float(out) if np.ndim(out) == 0 else out


def default_quality(k_max: int) -> int:
    return 4 * k_max + 64


def true_coeffs(ph: Phantom, k_max: int, quality_degree: int | None = None,
                max_nodes: int = DEFAULT_MAX_NODES) -> SvdCoeffs:
    """<f, f_{k,l,i}> by fine product cubature.

    Ellipses lying inside the disk are integrated on their own affine copy of
    a disk cubature of degree ``k_max``, which is exact for every basis
    function. Other phantoms use the disk cubature of ``quality_degree``.
    """
    q = default_quality(k_max) if quality_degree is None else quality_degree
    if q < 2 * k_max + 16:
        raise ValueError(f"quality degree {q} below the required 2*k_max+16 = {2 * k_max + 16}")
    cub = disk_cubature(q)
    if cub.size > max_nodes:
        raise MemoryError(f"cubature of degree {q} needs {cub.size} nodes (cap {max_nodes})")
    if ph.ellipses is not None and all(e.inside_disk() for e in ph.ellipses):
        vals = np.zeros(index_arrays(k_max)[0].size)
        exact = disk_cubature(max(k_max, 1))
        for e in ph.ellipses:
            x, y = e.map_from_disk(exact.x, exact.y)
            w = exact.weights * (e.intensity * e.axes[0] * e.axes[1])
            vals += project_points(k_max, x, y, w)
        return SvdCoeffs(k_max, vals)
    dens = ph.density(cub.x, cub.y).reshape(cub.radii.size, cub.angles.size)
    vals = dens * cub.node_weights[:, None]
    return SvdCoeffs(k_max, product_grid_project(k_max, vals, cub.radii, cub.angles))


@dataclass(frozen=True)
class Observation:
    alpha_hat: SvdCoeffs
    epsilon: float
    seed: int

    @property
    def k_max(self) -> int:
        return self.alpha_hat.k_max


def standard_normals(seed: int, n: int) -> np.ndarray:
    """n standard normal variates; entry i depends only on (seed, i)."""
    bitgen = np.random.Philox(key=np.uint64(seed % 2**64))
    raw = bitgen.random_raw(n).astype(np.uint64)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


def noisy_coeffs(alpha: SvdCoeffs, epsilon: float, seed: int) -> SvdCoeffs:
    """alpha + (epsilon / lambda_k) Z without range checks (epsilon = 0 and 1 allowed)."""
    if epsilon == 0:
        return SvdCoeffs(alpha.k_max, alpha.values.copy())
    ks = index_arrays(alpha.k_max)[0]
    z = standard_normals(seed, ks.size)
    return SvdCoeffs(alpha.k_max, alpha.values + epsilon / eigenvalue(ks) * z)


def observe(alpha: SvdCoeffs, epsilon: float, seed: int) -> Observation:
    """White-noise observation of the SVD coefficients at noise level epsilon in (0, 1)."""
    if not 0 < epsilon < 1:
        raise ValueError(f"noise level must lie in (0, 1), got {epsilon}")
    return Observation(noisy_coeffs(alpha, epsilon, seed), float(epsilon), int(seed))


def raster_grid(N: int):
    """Pixel-center coordinates on [-1, 1]^2 (row 0 at the top) and the disk mask."""
    c = -1 + (2 * np.arange(N) + 1) / N
    X, Y = np.meshgrid(c, c[::-1])
    return X, Y, X * X + Y * Y <= 1.0


def rasterize(ph: Phantom, N: int) -> np.ndarray:
    X, Y, mask = raster_grid(N)
    out = np.zeros((N, N))
    out[mask] = ph.density(X[mask], Y[mask])
    return out
