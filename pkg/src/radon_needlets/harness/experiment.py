"""Comparison study of SVD and needlet estimators over noise levels and seeds.

A cell is one ``(epsilon, seed)`` pair. Within a cell every estimator
variant is built from the same observation, all images are reconstructed in
one batch, and scored in every requested norm. Oracle rows pick the
variant with the smallest true error separately for each norm.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..estimators import (
    ReconstructedImage,
    ThresholdRule,
    linear_needlet,
    linear_svd,
    max_level,
    reconstruct_many,
    thresh_needlet,
    thresh_needlet_sup,
    thresh_svd,
    to_svd,
)
from ..sim import get_phantom, observe, rasterize, true_coeffs
from ..svd_basis import SvdCoeffs
from .config import ExperimentConfig
from .io import FAILED, ORACLE, ResultRow
from .metrics import lp_error

log = logging.getLogger(__name__)


def cell_levels(cfg: ExperimentConfig, epsilon: float) -> tuple[int, int]:
    """(J for LS/LN/TS/TN, J for TN_sup) at this noise level."""
    if cfg.j_override is not None:
        return cfg.j_override, cfg.j_override
    return max(1, max_level(epsilon, "standard")), max(1, max_level(epsilon, "sup_norm"))


def expected_row_count(cfg: ExperimentConfig) -> int:
    per = {"LS": 1, "LN": 1, "TS": len(cfg.kappas) + 1, "TN": len(cfg.kappas) + 1,
           "TN_sup": len(cfg.kappas) + 1}
    return sum(per[e] for e in cfg.estimators) * len(cfg.epsilons) * len(cfg.seeds) * len(cfg.norms)


@dataclass
class Truth:
    coeffs: SvdCoeffs
    image: ReconstructedImage


def build_truth(cfg: ExperimentConfig) -> Truth:
    J_top = max(max(cell_levels(cfg, e)) for e in cfg.epsilons)
    ph = get_phantom(cfg.phantom)
    coeffs = true_coeffs(ph, 2**J_top)
    return Truth(coeffs, ReconstructedImage.from_array(rasterize(ph, cfg.grid)))


@dataclass
class CellResult:
    rows: list[ResultRow]
    images: dict = field(default_factory=dict)


def _variants(cfg: ExperimentConfig, obs, epsilon: float):
    """Yield (estimator, parameter, callable returning SvdCoeffs)."""
    J, J_sup = cell_levels(cfg, epsilon)
    k_top = obs.k_max
    for est in cfg.estimators:
        if est == "LS":
            for Jp in range(1, J + 1):
                yield est, Jp, lambda Jp=Jp: linear_svd(obs, 2**Jp)
        elif est == "LN":
            for Jp in range(1, J + 1):
                yield est, Jp, lambda Jp=Jp: to_svd(linear_needlet(obs, Jp), k_top)
        elif est == "TS":
            for kap in cfg.kappas:
                rule = ThresholdRule("svd", kap, epsilon)
                yield est, kap, lambda rule=rule: thresh_svd(obs, rule, 2**J)
        elif est == "TN":
            for kap in cfg.kappas:
                rule = ThresholdRule("needlet", kap, epsilon)
                yield est, kap, lambda rule=rule: to_svd(thresh_needlet(obs, rule, J), k_top)
        elif est == "TN_sup":
            for kap in cfg.kappas:
                rule = ThresholdRule("needlet_sup", kap, epsilon)
                yield est, kap, lambda rule=rule: to_svd(thresh_needlet_sup(obs, rule, J_sup), k_top)


def run_cell(cfg: ExperimentConfig, truth: Truth, epsilon: float, seed: int,
             keep_images: bool = False) -> CellResult:
    obs = observe(truth.coeffs, epsilon, seed)
    labels, coeffs, times = [], [], []
    for est, param, build in _variants(cfg, obs, epsilon):
        t0 = time.perf_counter()
        coeffs.append(build())
        times.append(time.perf_counter() - t0)
        labels.append((est, float(param)))
    t0 = time.perf_counter()
    images = reconstruct_many(coeffs, cfg.grid)
    per_image = (time.perf_counter() - t0) / max(len(images), 1)
    times = [t + per_image for t in times]
    errors = np.array([[lp_error(truth.image, im, p) for p in cfg.norms] for im in images])

    rows = []
    for est in cfg.estimators:
        members = [n for n, (e, _) in enumerate(labels) if e == est]
        for pi, p in enumerate(cfg.norms):
            def row(kappa, n):
                wt = times[n] if cfg.timing else 0.0
                return ResultRow(est, p, epsilon, kappa, seed, float(errors[n, pi]), wt)

            if est in ("TS", "TN", "TN_sup"):
                rows.extend(row(labels[n][1], n) for n in members)
            best = min(members, key=lambda n: errors[n, pi])
            rows.append(row(ORACLE, best))
    out = CellResult(rows)
    if keep_images:
        for est in cfg.estimators:
            members = [n for n, (e, _) in enumerate(labels) if e == est]
            l2 = cfg.norms.index(2.0) if 2.0 in cfg.norms else 0
            best = min(members, key=lambda n: errors[n, l2])
            out.images[f"{est}_eps{epsilon:g}_seed{seed}"] = images[best]
    return out


def _failed_rows(cfg: ExperimentConfig, epsilon: float, seed: int) -> list[ResultRow]:
    return [ResultRow(e, p, epsilon, FAILED, seed, math.nan, 0.0) for e in cfg.estimators for p in cfg.norms]


def run_experiment(cfg: ExperimentConfig, threads: int = 1, truth: Truth | None = None,
                   images: dict | None = None) -> list[ResultRow]:
    """All result rows, sorted by (estimator, p, epsilon, kappa, seed).

    Failing cells are logged and reported as rows with kappa ``failed`` and a
    NaN error. Reconstructions of the first seed are stored in ``images``
    when a dict is passed.
    """
    cfg.validate()
    truth = truth or build_truth(cfg)
    cells = [(eps, seed) for eps in cfg.epsilons for seed in cfg.seeds]

    def task(cell):
        eps, seed = cell
        try:
            return run_cell(cfg, truth, eps, seed, keep_images=images is not None and seed == cfg.seeds[0])
        except Exception:
            log.exception("cell epsilon=%g seed=%d failed", eps, seed)
            return CellResult(_failed_rows(cfg, eps, seed))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, cells))
    else:
        results = [task(c) for c in cells]
    rows = [r for res in results for r in res.rows]
    if images is not None:
        images["truth"] = truth.image
        for res in results:
            images.update(res.images)
    return sorted(rows, key=ResultRow.sort_key)
