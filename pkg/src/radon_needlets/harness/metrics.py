"""Grid L_p distances between reconstructed images."""
from __future__ import annotations

import numpy as np


def lp_error(truth, est, p: float) -> float:
    """(sum over disk pixels |diff|^p (2/N)^2)^{1/p}; p = inf gives the max."""
    if truth.grid_size != est.grid_size:
        raise ValueError(f"grid mismatch: {truth.grid_size} vs {est.grid_size}")
    if not (p >= 1):
        raise ValueError("p must be >= 1")
    diff = np.abs(truth.values - est.values)[truth.mask]
    if np.isinf(p):
        return float(diff.max()) if diff.size else 0.0
    area = (2.0 / truth.grid_size) ** 2
    # rescale before powering so large p cannot overflow
    scale = diff.max() if diff.size else 0.0
    if scale == 0:
        return 0.0
    return float(scale * (np.sum((diff / scale) ** p) * area) ** (1.0 / p))
