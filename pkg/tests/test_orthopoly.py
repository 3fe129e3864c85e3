import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from radon_needlets.orthopoly import (
    GegenbauerParam,
    JacobiParams,
    gegenbauer_eval,
    gegenbauer_norm,
    gegenbauer_table,
    jacobi_eval,
    jacobi_norm,
    jacobi_table,
)


def test_jacobi_examples():
    assert jacobi_eval(0, JacobiParams(2.5, -0.3), 0.123) == 1.0
    assert jacobi_eval(5, JacobiParams(0, 3), 1.0) == pytest.approx(1.0, abs=1e-14)
    assert jacobi_eval(1, JacobiParams(0, 1), 0.0) == pytest.approx(-0.5, abs=1e-15)


@given(
    n=st.integers(0, 60),
    a=st.floats(-0.5, 12),
    b=st.floats(-0.5, 12),
    t=st.floats(-1, 1),
)
def test_jacobi_matches_scipy(n, a, b, t):
    ref = special.eval_jacobi(n, a, b, t)
    # the sup over [-1, 1] is attained at an endpoint for these parameters
    scale = max(1.0, special.binom(n + a, n), special.binom(n + b, n))
    assert abs(jacobi_eval(n, JacobiParams(a, b), t) - ref) <= 1e-11 * scale


def test_jacobi_table_rows_agree_with_scipy():
    t = np.linspace(-1, 1, 101)
    tab = jacobi_table(40, 0.0, 7.0, t)
    for n in range(41):
        ref = special.eval_jacobi(n, 0.0, 7.0, t)
        np.testing.assert_allclose(tab[n], ref, rtol=1e-10, atol=1e-10 * special.binom(n + 7, n))


@pytest.mark.parametrize("alpha", [0, 1, 3, 8])
def test_jacobi_endpoint_is_binomial(alpha):
    for n in range(51):
        assert jacobi_eval(n, JacobiParams(alpha, 2.0), 1.0) == pytest.approx(math.comb(n + alpha, n), rel=1e-13)


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (0.0, 3.0), (1.5, 0.5), (-0.5, 4.0)])
def test_jacobi_orthogonality(a, b):
    x, w = special.roots_jacobi(40, a, b)
    tab = jacobi_table(30, a, b, x)
    G = (tab * w) @ tab.T
    h = np.array([jacobi_norm(n, JacobiParams(a, b)) for n in range(31)])
    off = np.abs(G - np.diag(np.diag(G))) / np.sqrt(np.outer(h, h))
    assert off.max() < 1e-9
    np.testing.assert_allclose(np.diag(G), h, rtol=1e-10)


def test_jacobi_norm_examples():
    assert jacobi_norm(0, JacobiParams(0, 0)) == pytest.approx(2.0, rel=1e-15)
    assert jacobi_norm(0, JacobiParams(0, 1)) == pytest.approx(2.0, rel=1e-15)
    ref, _ = integrate.quad(lambda t: special.eval_jacobi(3, 0, 2, t) ** 2 * (1 + t) ** 2, -1, 1,
                            epsabs=0, epsrel=1e-13)
    assert jacobi_norm(3, JacobiParams(0, 2)) == pytest.approx(ref, rel=1e-10)


def test_gegenbauer_examples():
    assert gegenbauer_eval(0, GegenbauerParam(1.0), 0.3) == 1.0
    assert gegenbauer_eval(2, GegenbauerParam(1.0), 1.0) == pytest.approx(3.0, abs=1e-14)
    assert gegenbauer_eval(1, GegenbauerParam(1.0), 0.5) == pytest.approx(1.0, abs=1e-15)


@given(n=st.integers(0, 80), lam=st.floats(-0.45, 10).filter(lambda v: abs(v) > 1e-3), t=st.floats(-1, 1))
def test_gegenbauer_matches_scipy(n, lam, t):
    ref = special.eval_gegenbauer(n, lam, t)
    scale = max(1.0, abs(special.eval_gegenbauer(n, lam, 1.0)))
    assert abs(gegenbauer_eval(n, GegenbauerParam(lam), t) - ref) <= 1e-10 * scale


def test_chebyshev_second_kind_identity():
    phi = np.linspace(0.01, np.pi - 0.01, 997)
    tab = gegenbauer_table(200, 1.0, np.cos(phi))
    for n in range(201):
        np.testing.assert_allclose(tab[n] * np.sin(phi), np.sin((n + 1) * phi), atol=1e-10)


@pytest.mark.parametrize("n,lam", [(0, 1.0), (7, 1.0), (2, 0.5), (4, 2.5), (3, -0.25)])
def test_gegenbauer_norm_against_quadrature(n, lam):
    x, w = special.roots_gegenbauer(n + 5, lam)
    vals = gegenbauer_table(n, lam, x)[n]
    assert gegenbauer_norm(n, GegenbauerParam(lam)) == pytest.approx(np.dot(w, vals**2), rel=1e-11)


def test_gegenbauer_norm_closed_values():
    assert gegenbauer_norm(0, GegenbauerParam(1.0)) == pytest.approx(np.pi / 2, rel=1e-14)
    assert gegenbauer_norm(7, GegenbauerParam(1.0)) == pytest.approx(np.pi / 2, rel=1e-14)
    assert gegenbauer_norm(2, GegenbauerParam(0.5)) == pytest.approx(0.4, rel=1e-14)


def test_domain_errors():
    with pytest.raises(ValueError):
        jacobi_eval(2, JacobiParams(0, 0), 1.5)
    with pytest.raises(ValueError):
        gegenbauer_eval(2, GegenbauerParam(1.0), -1.01)
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        GegenbauerParam(-0.5)
    with pytest.raises(ValueError):
        jacobi_eval(1, JacobiParams(0, 0), np.nan)
