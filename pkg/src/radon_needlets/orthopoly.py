"""Jacobi and Gegenbauer polynomials by forward three-term recurrence.

Normalizations follow the classical conventions
``P_n^{(a,b)}(1) = binom(n+a, n)`` and ``C_n^lam(1) = Gamma(n+2 lam) / (n! Gamma(2 lam))``.
All evaluators accept scalars or arrays for ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, exp, pi, log

import numpy as np


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class GegenbauerParam:
    lam: float

    def __post_init__(self):
        if not self.lam > -0.5:
            raise ValueError(f"Gegenbauer parameter must exceed -1/2, got {self.lam}")


def _check_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(np.abs(t) > 1.0):
        raise ValueError("argument must lie in [-1, 1]")
    return t


def jacobi_table(n_max: int, alpha: float, beta: float, t) -> np.ndarray:
    """Values of P_0 .. P_{n_max} at ``t``; shape ``(n_max + 1,) + t.shape``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    JacobiParams(alpha, beta)
    t = _check_interval(t)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    ab = alpha + beta
    out[1] = (alpha + 1) + (ab + 2) * (t - 1) / 2
    for n in range(2, n_max + 1):
        c = 2 * n + ab
        a1 = 2 * n * (n + ab) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (n + alpha - 1) * (n + beta - 1) * c
        out[n] = ((a2 + a3 * t) * out[n - 1] - a4 * out[n - 2]) / a1
    return out


def jacobi_eval(n: int, params: JacobiParams, t):
    """P_n^{(alpha, beta)}(t)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    val = jacobi_table(n, params.alpha, params.beta, t)[n]
    return float(val) if val.ndim == 0 else val


def jacobi_norm(n: int, params: JacobiParams) -> float:
    """Squared L2 norm of P_n against the weight (1-t)^alpha (1+t)^beta."""
    a, b = params.alpha, params.beta
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        # closed form with (2n+a+b+1) Gamma(n+a+b+1) folded into Gamma(a+b+2)
        return exp((a + b + 1) * log(2) + lgamma(a + 1) + lgamma(b + 1) - lgamma(a + b + 2))
    return exp(
        (a + b + 1) * log(2)
        - log(2 * n + a + b + 1)
        + lgamma(n + a + 1)
        + lgamma(n + b + 1)
        - lgamma(n + 1)
        - lgamma(n + a + b + 1)
    )


def gegenbauer_table(n_max: int, lam: float, t) -> np.ndarray:
    """Values of C_0^lam .. C_{n_max}^lam at ``t``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    GegenbauerParam(lam)
    t = _check_interval(t)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    out[1] = 2 * lam * t
    for n in range(2, n_max + 1):
        out[n] = (2 * (n + lam - 1) * t * out[n - 1] - (n + 2 * lam - 2) * out[n - 2]) / n
    return out


def gegenbauer_eval(n: int, param: GegenbauerParam, t):
    """C_n^lam(t)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    val = gegenbauer_table(n, param.lam, t)[n]
    return float(val) if val.ndim == 0 else val


def gegenbauer_norm(n: int, param: GegenbauerParam) -> float:
    """Squared L2 norm of C_n^lam against (1 - t^2)^(lam - 1/2)."""
    lam = param.lam
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if lam == 0:
        raise ValueError("the closed-form norm is singular at lam = 0")
    # lgamma is log|Gamma|; for -1/2 < lam < 0 the signs of Gamma(2 lam) and lam cancel at n = 0
    logh = (
        (1 - 2 * lam) * log(2) + log(pi) - 2 * lgamma(lam)
        + lgamma(n + 2 * lam) - log(abs(n + lam)) - lgamma(n + 1)
    )
    return exp(logh)
