"""Singular system of the 2-D Radon transform on the unit disk.

Disk functions ``f_{k,l,i}`` are normalized Zernike-type polynomials, the
cylinder functions ``g_{k,l,i}`` live on S^1 x [-1, 1] with measure
``dtheta ds / sqrt(1 - s^2)`` and ``R f_{k,l,i} = lambda_k g_{k,l,i}``.

Coefficient vectors are stored densely in the canonical (k, l, i) order
returned by :func:`enumerate_indices`. The index ``(l=0, i=2)`` is never
produced since ``sin(0 * theta)`` vanishes identically.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from math import sqrt, pi
from typing import NamedTuple

import numpy as np

from .orthopoly import jacobi_table, gegenbauer_table


class SvdIndex(NamedTuple):
    k: int
    l: int
    i: int

    def validate(self):
        k, l, i = self
        if not (0 <= l <= k and (k - l) % 2 == 0 and i in (1, 2) and not (l == 0 and i == 2)):
            raise ValueError(f"invalid SVD index {tuple(self)}")
        return self


def n_indices(k_max: int) -> int:
    """Number of basis functions with degree below ``k_max``."""
    return k_max * (k_max + 1) // 2


def enumerate_indices(k_max: int) -> list[SvdIndex]:
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    out = []
    for k in range(k_max):
        for l in range(k % 2, k + 1, 2):
            out.append(SvdIndex(k, l, 1))
            if l > 0:
                out.append(SvdIndex(k, l, 2))
    return out


def position(idx: SvdIndex) -> int:
    """Offset of ``idx`` in the canonical ordering."""
    k, l, i = SvdIndex(*idx).validate()
    pos = n_indices(k)
    # entries for smaller l at this k: l' = k%2, k%2+2, ..., l-2
    for lp in range(k % 2, l, 2):
        pos += 1 if lp == 0 else 2
    return pos + (i - 1)


@lru_cache(maxsize=64)
def index_arrays(k_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k, l, i) of every index as read-only integer arrays."""
    idx = enumerate_indices(k_max)
    arrs = tuple(np.array([t[c] for t in idx], dtype=np.int64).reshape(-1) for c in range(3))
    for a in arrs:
        a.flags.writeable = False
    return arrs


@dataclass
class SvdCoeffs:
    """Dense coefficient vector over all indices with ``k < k_max``."""

    k_max: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (n_indices(self.k_max),):
            raise ValueError(
                f"expected {n_indices(self.k_max)} coefficients for k_max={self.k_max}, "
                f"got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zeros(cls, k_max: int) -> "SvdCoeffs":
        return cls(k_max, np.zeros(n_indices(k_max)))

    @classmethod
    def unit(cls, k_max: int, idx) -> "SvdCoeffs":
        c = cls.zeros(k_max)
        c.values[position(idx)] = 1.0
        return c

    def __getitem__(self, idx) -> float:
        return float(self.values[position(idx)])

    def degrees(self) -> np.ndarray:
        return index_arrays(self.k_max)[0]

    def resized(self, k_max: int) -> "SvdCoeffs":
        """Truncate or zero-pad to a different ``k_max``."""
        n_new, n_old = n_indices(k_max), n_indices(self.k_max)
        vals = np.zeros(n_new)
        m = min(n_new, n_old)
        vals[:m] = self.values[:m]
        return SvdCoeffs(k_max, vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "i", "value"])
        for (k, l, i), v in zip(enumerate_indices(self.k_max), self.values):
            w.writerow([k, l, i, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SvdCoeffs":
        rows = list(csv.DictReader(io.StringIO(text)))
        k_max = 1 + max(int(r["k"]) for r in rows) if rows else 0
        c = cls.zeros(k_max)
        for r in rows:
            c.values[position(SvdIndex(int(r["k"]), int(r["l"]), int(r["i"])))] = float(r["value"])
        return c


def eigenvalue(k):
    """Singular value lambda_k = 2 sqrt(pi) / sqrt(k + 1)."""
    k = np.asarray(k)
    if np.any(k < 0):
        raise ValueError("degree must be nonnegative")
    val = 2 * sqrt(pi) / np.sqrt(k + 1.0)
    return float(val) if val.ndim == 0 else val


def _angular_constant(l):
    return np.where(np.asarray(l) == 0, 1 / sqrt(2 * pi), 1 / sqrt(pi))


def angular(l: int, i: int, theta):
    """Y_{l,i}(theta)."""
    c = float(_angular_constant(l))
    theta = np.asarray(theta, dtype=float)
    return c * (np.cos(l * theta) if i == 1 else np.sin(l * theta))


def radial_table(k_max: int, l: int, r) -> np.ndarray:
    """Radial factors for k = l, l+2, ... < k_max; shape ``(n_k,) + r.shape``.

    sqrt(2k+2) P_{(k-l)/2}^{(0,l)}(2r^2 - 1) r^l
    """
    r = np.asarray(r, dtype=float)
    n_k = (k_max - l + 1) // 2 if k_max > l else 0
    if n_k == 0:
        return np.empty((0,) + r.shape)
    t = np.clip(2 * r * r - 1, -1.0, 1.0)
    P = jacobi_table(n_k - 1, 0.0, float(l), t)
    ks = l + 2 * np.arange(n_k)
    scale = np.sqrt(2 * ks + 2.0).reshape((-1,) + (1,) * r.ndim)
    return scale * P * r**l


def radial_matrix(k_max: int, r) -> np.ndarray:
    """Radial factor of every index at radii ``r``; shape ``(len(r), n_indices)``."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    ks, ls, _ = index_arrays(k_max)
    out = np.empty((r.size, ks.size))
    for l in range(k_max):
        tab = radial_table(k_max, l, r)
        for n, k in enumerate(range(l, k_max, 2)):
            sel = (ks == k) & (ls == l)
            out[:, sel] = tab[n][:, None]
    return out


def angular_matrix(k_max: int, theta) -> np.ndarray:
    """Angular factor Y_{l,i} of every index at ``theta``; shape ``(len(theta), n_indices)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    _, ls, is_ = index_arrays(k_max)
    arg = np.outer(theta, ls)
    trig = np.where(is_ == 1, np.cos(arg), np.sin(arg))
    return trig * _angular_constant(ls)


def _polar(p):
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    r = np.hypot(x, y)
    if np.any(r > 1 + 1e-12):
        raise ValueError("point outside the closed unit disk")
    return np.minimum(r, 1.0), np.arctan2(y, x)


def eval_f(idx: SvdIndex, p):
    """f_{k,l,i} at Cartesian point(s) ``p`` (last axis of length 2)."""
    k, l, i = SvdIndex(*idx).validate()
    r, th = _polar(p)
    rad = radial_table(k + 1, l, r)[-1]
    val = rad * angular(l, i, th)
    return float(val) if np.ndim(val) == 0 else val


def basis_matrix(k_max: int, x, y) -> np.ndarray:
    """Values of all f_{k,l,i}, ``k < k_max``, at points (x, y); shape ``(npts, n_indices)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    y = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    r, th = _polar(np.stack([x, y], axis=-1))
    return radial_matrix(k_max, r) * angular_matrix(k_max, th)


def synthesize(coeffs: SvdCoeffs, x, y) -> np.ndarray:
    """Evaluate sum_n c_n f_n at points, working one angular frequency at a time."""
    return synthesize_many(coeffs.k_max, coeffs.values[:, None], x, y)[:, 0]


def synthesize_many(k_max: int, C: np.ndarray, x, y) -> np.ndarray:
    """Evaluate several coefficient columns ``C`` (n_indices x n_cols) at points."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    y = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    r, th = _polar(np.stack([x, y], axis=-1))
    ks, ls, is_ = index_arrays(k_max)
    out = np.zeros((x.size, C.shape[1]))
    for l in range(k_max):
        tab = radial_table(k_max, l, r)  # (n_k, npts)
        c = float(_angular_constant(l))
        cos_sel = np.flatnonzero((ls == l) & (is_ == 1))
        out += (tab.T @ C[cos_sel]) * (c * np.cos(l * th))[:, None]
        if l > 0:
            sin_sel = np.flatnonzero((ls == l) & (is_ == 2))
            out += (tab.T @ C[sin_sel]) * (c * np.sin(l * th))[:, None]
    return out


def project_points(k_max: int, x, y, weights) -> np.ndarray:
    """sum_p w_p f_n(x_p, y_p) for every index n (adjoint of :func:`synthesize`)."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    y = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    w = np.broadcast_to(np.asarray(weights, dtype=float), x.shape).ravel()
    r, th = _polar(np.stack([x, y], axis=-1))
    _, ls, is_ = index_arrays(k_max)
    out = np.zeros(ls.size)
    for l in range(k_max):
        tab = radial_table(k_max, l, r)
        c = float(_angular_constant(l))
        out[(ls == l) & (is_ == 1)] = tab @ (w * c * np.cos(l * th))
        if l > 0:
            out[(ls == l) & (is_ == 2)] = tab @ (w * c * np.sin(l * th))
    return out


def eval_g(idx: SvdIndex, theta, s):
    """g_{k,l,i}(theta, s) = (pi/2)^{-1/2} sqrt(1 - s^2) C_k^1(s) Y_{l,i}(theta)."""
    k, l, i = SvdIndex(*idx).validate()
    s = np.asarray(s, dtype=float)
    C = gegenbauer_table(k, 1.0, s)[k]
    val = sqrt(2 / pi) * np.sqrt(np.clip(1 - s * s, 0.0, None)) * C * angular(l, i, theta)
    return float(val) if np.ndim(val) == 0 else val


def product_grid_values(k_max: int, coeffs: np.ndarray, radii, angles) -> np.ndarray:
    """sum_n c_n f_n(r_a, theta_q) on a polar product grid; shape ``(len(radii), len(angles))``."""
    R = radial_matrix(k_max, radii)
    A = angular_matrix(k_max, angles)
    return (R * coeffs) @ A.T


def product_grid_project(k_max: int, values: np.ndarray, radii, angles) -> np.ndarray:
    """Adjoint of :func:`product_grid_values`: sum_{a,q} v[a,q] f_n(r_a, theta_q)."""
    R = radial_matrix(k_max, radii)
    A = angular_matrix(k_max, angles)
    return np.einsum("an,an->n", R, values @ A)


def radon_numeric(fn, theta, s, nodes: int = 400) -> np.ndarray:
    """Line integral of ``fn(x, y)`` along {<y, e_theta> = s} by Gauss-Legendre on the chord."""
    theta, s = np.broadcast_arrays(np.asarray(theta, float), np.asarray(s, float))
    t, w = np.polynomial.legendre.leggauss(nodes)
    half = np.sqrt(np.clip(1 - s * s, 0.0, None))
    c, sn = np.cos(theta), np.sin(theta)
    u = half[..., None] * t  # position along the chord
    x = s[..., None] * c[..., None] - u * sn[..., None]
    y = s[..., None] * sn[..., None] + u * c[..., None]
    vals = fn(x, y)
    return half * np.sum(vals * w, axis=-1)
