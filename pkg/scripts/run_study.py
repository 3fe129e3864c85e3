#!/usr/bin/env python3
"""Run the comparison study and print a per-noise-level summary of mean errors."""
import argparse
import os
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from radon_needlets.harness.cli import main as cli_main
from radon_needlets.harness.io import ORACLE, read_csv

ROOT = Path(__file__).resolve().parents[1]


def summarize(rows, p=2.0):
    table = defaultdict(list)
    for r in rows:
        if r.p != p:
            continue
        if r.kappa == ORACLE:
            table[(r.estimator + "*", r.epsilon)].append(r.error)
        elif r.estimator == "TN" and r.kappa == 3.0:
            table[("TN(3)", r.epsilon)].append(r.error)
    names = sorted({k[0] for k in table})
    eps = sorted({k[1] for k in table})
    print(f"mean L{p:g} error ('*' = oracle parameter)")
    print("epsilon  " + " ".join(f"{n:>9}" for n in names))
    for e in eps:
        print(f"{e:<8g} " + " ".join(f"{np.mean(table[(n, e)]):9.4f}" for n in names))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "study.cfg"))
    ap.add_argument("--out", default=str(ROOT / "results" / "study"))
    ap.add_argument("--threads", type=int, default=int(os.environ.get("NEEDLET_THREADS", os.cpu_count() or 1)))
    args = ap.parse_args()
    code = cli_main(["-v", "run", "--config", args.config, "--out", args.out, "--threads", str(args.threads)])
    rows = read_csv(Path(args.out) / "results.csv")
    for p in (2.0, float("inf")):
        summarize(rows, p)
    sys.exit(code)
