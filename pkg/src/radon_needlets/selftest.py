"""Fast invariant checks that run without pytest (``radon-needlets selftest``)."""
from __future__ import annotations

import time
from typing import Callable

import numpy as np

from .cubature import disk_cubature, needlet_grid
from .estimators import ThresholdRule, reconstruct, thresh_needlet
from .needlet import NOISE_BOUND, analysis, filter_b, noise_profile, synthesis
from .sim import Observation, noisy_coeffs, polynomial_phantom, rasterize
from .svd_basis import SvdCoeffs, basis_matrix, n_indices


def _gram():
    c = disk_cubature(26)
    B = basis_matrix(13, c.x, c.y)
    G = (B * c.weights[:, None]).T @ B
    err = np.max(np.abs(G - np.eye(G.shape[0])))
    return err < 1e-8, f"max |G - I| = {err:.2e}"


def _partition():
    t = np.linspace(1, 200, 20001)
    s = sum(filter_b(t * 2.0**-j) for j in range(10))
    err = np.max(np.abs(s - 1))
    return err < 1e-12, f"max deviation {err:.2e}"


def _round_trip():
    rng = np.random.default_rng(0)
    J = 4
    a = SvdCoeffs(2 ** (J - 1), rng.standard_normal(n_indices(2 ** (J - 1))))
    beta = analysis(a.resized(2**J), J)
    back = synthesis(beta, 2**J).resized(a.k_max)
    pars = abs(beta.energy() - np.sum(a.values**2)) / np.sum(a.values**2)
    rt = np.linalg.norm(back.values - a.values) / np.linalg.norm(a.values)
    return max(pars, rt) < 1e-9, f"Parseval {pars:.1e}, round trip {rt:.1e}"


def _weights():
    ok = all(np.all(needlet_grid(j).cubature.weights > 0) for j in range(6))
    return ok, "positive weights for j <= 5"


def _noise_bound():
    worst = max(noise_profile(5).level_bound_ratio())
    return worst <= NOISE_BOUND, f"max sigma^2 2^-j = {worst:.4f} (bound {NOISE_BOUND:.4f})"


def _pipeline():
    J = 4
    rng = np.random.default_rng(1)
    c = SvdCoeffs(2 ** (J - 1), rng.standard_normal(n_indices(2 ** (J - 1))))
    ph = polynomial_phantom(c)
    alpha = c.resized(2**J)
    obs = Observation(noisy_coeffs(alpha, 0.0, 0), 0.5, 0)
    est = thresh_needlet(obs, ThresholdRule("needlet", 0.0, 0.5), J)
    img = reconstruct(synthesis(est, 2**J), 64)
    err = np.max(np.abs(img.values - rasterize(ph, 64)))
    return err < 1e-7, f"max pixel error {err:.1e}"


CHECKS: dict[str, Callable] = {
    "svd gram identity": _gram,
    "filter partition of unity": _partition,
    "tight frame round trip": _round_trip,
    "positive cubature weights": _weights,
    "noise variance bound": _noise_bound,
    "zero-noise pipeline identity": _pipeline,
}


def run_selftest(out=print) -> bool:
    all_ok = True
    for name, check in CHECKS.items():
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - t0:.2f}s)")
    return all_ok
