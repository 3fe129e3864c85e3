"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
``NEEDLET_THREADS`` sets the worker count when ``--threads`` is not given.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from pathlib import Path

from ..estimators import ReconstructedImage
from ..sim import get_phantom, rasterize, true_coeffs
from .config import ConfigError, format_config, load_config
from .experiment import expected_row_count, run_experiment
from .io import FAILED, emit_csv, emit_images, write_pgm

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("radon_needlets")


def _threads(arg) -> int:
    if arg is not None:
        n = arg
    else:
        env = os.environ.get("NEEDLET_THREADS", "1")
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"NEEDLET_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise ConfigError("thread count must be positive")
    return n


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    threads = _threads(args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.used").write_text(format_config(cfg), encoding="utf-8")
    images = {} if cfg.save_images else None
    t0 = time.perf_counter()
    rows = run_experiment(cfg, threads=threads, images=images)
    emit_csv(rows, out / "results.csv")
    if images is not None:
        emit_images(images, out / "images")
    n_failed = sum(1 for r in rows if r.kappa == FAILED or not math.isfinite(r.error))
    log.info("%d rows (%d expected) in %.1fs", len(rows), expected_row_count(cfg), time.perf_counter() - t0)
    if n_failed:
        log.error("%d rows report a numerical failure", n_failed)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_render(args) -> int:
    if args.n < 2:
        raise ConfigError("--n must be at least 2")
    img = ReconstructedImage.from_array(rasterize(get_phantom(args.name), args.n))
    write_pgm(img.values, args.out, img.mask)
    return EXIT_OK


def cmd_dump(args) -> int:
    if args.kmax < 0:
        raise ConfigError("--kmax must be nonnegative")
    coeffs = true_coeffs(get_phantom(args.phantom), args.kmax)
    Path(args.out).write_text(coeffs.to_csv(), encoding="utf-8")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from ..selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radon-needlets", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a comparison study from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default="results")
    r.add_argument("--threads", type=int, default=None)
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("render-phantom", help="write a phantom as an 8-bit PGM")
    rp.add_argument("--name", required=True)
    rp.add_argument("--n", type=int, default=256)
    rp.add_argument("--out", required=True)
    rp.set_defaults(func=cmd_render)

    d = sub.add_parser("dump-coeffs", help="write true SVD coefficients as CSV")
    d.add_argument("--phantom", required=True)
    d.add_argument("--kmax", type=int, required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dump)

    s = sub.add_parser("selftest", help="run the fast invariant checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # unknown phantom names and similar bad arguments
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError, MemoryError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
