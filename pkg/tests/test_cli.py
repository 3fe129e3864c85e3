import subprocess
import sys

import numpy as np
import pytest

from radon_needlets.harness import cli
from radon_needlets.harness.io import read_csv, read_pgm
from radon_needlets.sim import shepp_logan, true_coeffs
from radon_needlets.svd_basis import SvdCoeffs

SMOKE = """
epsilons = 0.01
kappas = 3
norms = 2, inf
seeds = 0
grid = 32
j_override = 3
timing = false
"""


def write_cfg(tmp_path, text=SMOKE):
    p = tmp_path / "c.cfg"
    p.write_text(text)
    return str(p)


def test_run_writes_results(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["run", "--config", write_cfg(tmp_path), "--out", str(out), "--threads", "2"]) == 0
    rows = read_csv(out / "results.csv")
    assert len(rows) == (2 + 3 * 2) * 2
    assert (out / "config.used").exists()


def test_run_is_byte_identical_on_rerun(tmp_path):
    cfg = write_cfg(tmp_path)
    for name in ("a", "b"):
        cli.main(["run", "--config", cfg, "--out", str(tmp_path / name)])
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_config_error_exit_code(tmp_path):
    assert cli.main(["run", "--config", write_cfg(tmp_path, "grid = 8"), "--out", str(tmp_path)]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == 2


def test_thread_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("NEEDLET_THREADS", "3")
    seen = {}
    real = cli.run_experiment

    def spy(cfg, threads=1, **kw):
        seen["threads"] = threads
        return real(cfg, threads=threads, **kw)

    monkeypatch.setattr(cli, "run_experiment", spy)
    assert cli.main(["run", "--config", write_cfg(tmp_path), "--out", str(tmp_path / "o")]) == 0
    assert seen["threads"] == 3
    monkeypatch.setenv("NEEDLET_THREADS", "many")
    assert cli.main(["run", "--config", write_cfg(tmp_path), "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    from radon_needlets.harness import experiment

    def broken(*a, **k):
        raise FloatingPointError("bad")

    monkeypatch.setattr(experiment, "observe", broken)
    assert cli.main(["run", "--config", write_cfg(tmp_path), "--out", str(tmp_path / "o")]) == 3


def test_render_phantom(tmp_path):
    out = tmp_path / "sl.pgm"
    assert cli.main(["render-phantom", "--name", "shepp_logan", "--n", "64", "--out", str(out)]) == 0
    img = read_pgm(out)
    assert img.shape == (64, 64) and img.max() == 255
    assert cli.main(["render-phantom", "--name", "nothing", "--n", "64", "--out", str(out)]) == 2


def test_dump_coeffs(tmp_path):
    out = tmp_path / "c.csv"
    assert cli.main(["dump-coeffs", "--phantom", "shepp_logan", "--kmax", "12", "--out", str(out)]) == 0
    back = SvdCoeffs.from_csv(out.read_text())
    np.testing.assert_array_equal(back.values, true_coeffs(shepp_logan(), 12).values)


def test_selftest_command(capsys):
    assert cli.main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "radon_needlets", "selftest"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.count("PASS") >= 5
