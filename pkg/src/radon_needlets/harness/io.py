"""CSV and PGM writers for experiment outputs."""
from __future__ import annotations

import csv
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CSV_HEADER = ("estimator", "p", "epsilon", "kappa", "seed", "error", "wall_time")
ORACLE = "oracle"
FAILED = "failed"


@dataclass(frozen=True)
class ResultRow:
    estimator: str
    p: float
    epsilon: float
    kappa: float | str  # a swept value, ORACLE, or FAILED
    seed: int
    error: float
    wall_time: float

    def sort_key(self):
        kap = (0, self.kappa, "") if isinstance(self.kappa, float) else (1, 0.0, self.kappa)
        return (self.estimator, self.p, self.epsilon, kap, self.seed)


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _parse_num(s: str) -> float:
    return float(s)


def format_rows(rows) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in rows:
        kap = _num(r.kappa) if isinstance(r.kappa, float) else r.kappa
        lines.append(",".join([
            r.estimator, _num(r.p), _num(r.epsilon), kap, str(r.seed), _num(r.error), _num(r.wall_time),
        ]))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_rows(rows))
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_rows(text: str) -> list[ResultRow]:
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        est, p, eps, kap, seed, err, wt = rec
        kappa = kap if kap in (ORACLE, FAILED) else _parse_num(kap)
        rows.append(ResultRow(est, _parse_num(p), _parse_num(eps), kappa, int(seed),
                              _parse_num(err), _parse_num(wt)))
    return rows


def read_csv(path) -> list[ResultRow]:
    with open(path, encoding="utf-8") as fh:
        return parse_rows(fh.read())


def write_pgm(values: np.ndarray, path, mask: np.ndarray | None = None) -> tuple[float, float]:
    """8-bit binary PGM (P5) with a linear map [min, max] -> [0, 255].

    The map is written to a sidecar ``<path>.txt``; returns (min, max).
    """
    path = Path(path)
    vals = np.asarray(values, dtype=float)
    sel = vals[mask] if mask is not None else vals
    lo, hi = (float(sel.min()), float(sel.max())) if sel.size else (0.0, 0.0)
    span = hi - lo if hi > lo else 1.0
    img = np.clip(np.round((vals - lo) / span * 255), 0, 255).astype(np.uint8)
    if mask is not None:
        img[~mask] = 0
    h, w = img.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
        with open(str(path) + ".txt", "w", encoding="utf-8") as fh:
            fh.write(f"min = {_num(lo)}\nmax = {_num(hi)}\n")
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc
    return lo, hi


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", data)
    if m is None:
        raise ValueError("not a binary PGM")
    w, h = int(m.group(1)), int(m.group(2))
    return np.frombuffer(data[m.end(): m.end() + w * h], dtype=np.uint8).reshape(h, w)


def emit_images(images: dict, directory) -> list[Path]:
    """Write each ``name -> ReconstructedImage`` as ``<directory>/<name>.pgm``."""
    directory = Path(directory)
    os.makedirs(directory, exist_ok=True)
    out = []
    for name in sorted(images):
        im = images[name]
        p = directory / f"{name}.pgm"
        write_pgm(im.values, p, im.mask)
        out.append(p)
    return out
