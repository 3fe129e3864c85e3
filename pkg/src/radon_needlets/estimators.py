"""SVD and needlet estimators of f from a noisy observation, plus image reconstruction."""
from __future__ import annotations

from dataclasses import dataclass
from math import log, log2, sqrt, floor

import numpy as np

from .needlet import (
    NeedletCoeffs,
    analysis,
    needlet_sup_norms,
    noise_profile,
    synthesis,
)
from .sim import Observation, raster_grid
from .svd_basis import SvdCoeffs, eigenvalue, index_arrays, synthesize_many, n_indices

DIMENSION = 2
KINDS = ("svd", "needlet", "needlet_sup")


def noise_scale(epsilon: float) -> float:
    """c_eps = eps sqrt(log 1/eps)."""
    if not 0 < epsilon < 1:
        raise ValueError(f"noise level must lie in (0, 1), got {epsilon}")
    return epsilon * sqrt(log(1 / epsilon))


@dataclass(frozen=True)
class ThresholdRule:
    kind: str
    kappa: float
    epsilon: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        noise_scale(self.epsilon)

    @property
    def c_eps(self) -> float:
        return noise_scale(self.epsilon)


def hard_threshold(x, T):
    """x where |x| >= T, else 0."""
    if np.any(np.asarray(T) < 0):
        raise ValueError("threshold must be nonnegative")
    x = np.asarray(x, dtype=float)
    out = np.where(np.abs(x) >= T, x, 0.0)
    return float(out) if out.ndim == 0 else out


def max_level(epsilon: float, variant: str = "standard") -> int:
    """Finest needlet level J_eps for noise level epsilon.

    standard: largest J with 2^{J (d - 1/2)} <= 1 / c_eps.
    sup_norm: J = floor(log2(1 / c_eps) / d).
    """
    inv = 1 / noise_scale(epsilon)
    if variant == "standard":
        J = floor(log2(inv) / (DIMENSION - 0.5))
        # guard against rounding at exact powers
        while 2.0 ** ((J + 1) * (DIMENSION - 0.5)) <= inv:
            J += 1
        while J > 0 and 2.0 ** (J * (DIMENSION - 0.5)) > inv:
            J -= 1
        return J
    if variant == "sup_norm":
        return floor(log2(inv) / DIMENSION)
    raise ValueError(f"unknown variant {variant!r}")


def _truncated(alpha: SvdCoeffs, k_cut: int) -> np.ndarray:
    if k_cut > alpha.k_max:
        raise ValueError(f"k_cut={k_cut} exceeds available k_max={alpha.k_max}")
    vals = alpha.values.copy()
    vals[n_indices(max(k_cut, 0)):] = 0.0
    return vals


def linear_svd(obs: Observation, k_cut: int) -> SvdCoeffs:
    """Keep the noisy SVD coefficients of degree below ``k_cut``."""
    return SvdCoeffs(obs.k_max, _truncated(obs.alpha_hat, k_cut))


def svd_thresholds(rule: ThresholdRule, k_max: int) -> np.ndarray:
    """T_k = kappa c_eps / lambda_k for every index."""
    ks = index_arrays(k_max)[0]
    return rule.kappa * rule.c_eps / eigenvalue(ks)


def thresh_svd(obs: Observation, rule: ThresholdRule, k_cut: int) -> SvdCoeffs:
    if rule.kind != "svd":
        raise ValueError("thresh_svd needs a rule of kind 'svd'")
    vals = _truncated(obs.alpha_hat, k_cut)
    return SvdCoeffs(obs.k_max, hard_threshold(vals, svd_thresholds(rule, obs.k_max)))


def _check_levels(obs: Observation, J: int):
    if obs.k_max < 2**J:
        raise ValueError(f"needlet estimate at J={J} needs k_max >= {2**J}, got {obs.k_max}")


def linear_needlet(obs: Observation, J: int, rotation: float = 0.0) -> NeedletCoeffs:
    _check_levels(obs, J)
    return analysis(obs.alpha_hat, J, rotation)


def needlet_thresholds(rule: ThresholdRule, J: int, scaling: str = "sigma",
                       rotation: float = 0.0) -> list[np.ndarray]:
    """Per-node thresholds for each level.

    sigma: T_{j,xi} = kappa sigma_{j,xi} c_eps (noise-calibrated).
    nu:    T_j = kappa 2^{j (d-1)/2} c_eps.
    """
    if scaling == "sigma":
        prof = noise_profile(J, rotation)
        return [rule.kappa * s * rule.c_eps for s in prof.sigma]
    if scaling == "nu":
        nu = (DIMENSION - 1) / 2
        grids = analysis(SvdCoeffs.zeros(2**J), J, rotation).grids
        return [np.full(g.size, rule.kappa * 2.0 ** (j * nu) * rule.c_eps) for j, g in enumerate(grids)]
    raise ValueError(f"unknown threshold scaling {scaling!r}")


def thresh_needlet(obs: Observation, rule: ThresholdRule, J: int, scaling: str = "sigma",
                   rotation: float = 0.0) -> NeedletCoeffs:
    """Hard-threshold every level j >= 0; the scaling coefficient is kept."""
    if rule.kind != "needlet":
        raise ValueError("thresh_needlet needs a rule of kind 'needlet'")
    beta = linear_needlet(obs, J, rotation)
    T = needlet_thresholds(rule, J, scaling, rotation)
    return beta.replace_levels([hard_threshold(v, t) for v, t in zip(beta.levels, T)])


def sup_keep_mask(beta: NeedletCoeffs, rule: ThresholdRule, sup_norms) -> list[np.ndarray]:
    return [
        (np.abs(v) * s >= rule.kappa * 4.0**j * rule.c_eps) & (v != 0)
        for j, (v, s) in enumerate(zip(beta.levels, sup_norms))
    ]


def thresh_needlet_sup(obs: Observation, rule: ThresholdRule, J: int | None = None,
                       rotation: float = 0.0) -> NeedletCoeffs:
    """Keep beta_{j,xi} when |beta| ||psi_{j,xi}||_inf >= kappa 2^{2j} c_eps."""
    if rule.kind != "needlet_sup":
        raise ValueError("thresh_needlet_sup needs a rule of kind 'needlet_sup'")
    J = max_level(rule.epsilon, "sup_norm") if J is None else J
    beta = linear_needlet(obs, J, rotation)
    keep = sup_keep_mask(beta, rule, needlet_sup_norms(J, rotation))
    return beta.replace_levels([np.where(k, v, 0.0) for v, k in zip(beta.levels, keep)])


def to_svd(beta: NeedletCoeffs, k_max: int) -> SvdCoeffs:
    return synthesis(beta, k_max)


@dataclass
class ReconstructedImage:
    grid_size: int
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        N = self.grid_size
        if self.values.shape != (N, N) or self.mask.shape != (N, N):
            raise ValueError("image and mask must be N x N")
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ValueError("image must be finite on the disk")

    @classmethod
    def from_array(cls, values: np.ndarray) -> "ReconstructedImage":
        N = values.shape[0]
        mask = raster_grid(N)[2]
        return cls(N, np.where(mask, values, 0.0), mask)


def reconstruct_many(alphas: list[SvdCoeffs], N: int) -> list[ReconstructedImage]:
    """Evaluate several coefficient vectors on the same N x N pixel grid."""
    if N < 2:
        raise ValueError("grid size must be at least 2")
    if not alphas:
        return []
    k_max = max(a.k_max for a in alphas)
    C = np.stack([a.resized(k_max).values for a in alphas], axis=1)
    X, Y, mask = raster_grid(N)
    vals = synthesize_many(k_max, C, X[mask], Y[mask])
    out = []
    for n in range(len(alphas)):
        img = np.zeros((N, N))
        img[mask] = vals[:, n]
        out.append(ReconstructedImage(N, img, mask))
    return out


def reconstruct(alpha_star: SvdCoeffs, N: int) -> ReconstructedImage:
    """f_hat = sum alpha* f_{k,l,i} at pixel centers of [-1, 1]^2; zero off the disk."""
    return reconstruct_many([alpha_star], N)[0]


def average_estimates(images: list[ReconstructedImage]) -> ReconstructedImage:
    if not images:
        raise ValueError("need at least one image")
    N = images[0].grid_size
    if any(im.grid_size != N for im in images):
        raise ValueError("all images must share the grid size")
    return ReconstructedImage(N, np.mean([im.values for im in images], axis=0), images[0].mask)
