"""Incomplete beta functions and the separability-function ansatz curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate_1d

__all__ = [
    "BetaParams",
    "complete_beta",
    "incomplete_beta",
    "regularized_beta",
    "regularized_beta_half_two",
    "dyson_ansatz",
    "legacy_ansatz",
    "LEGACY_REAL",
    "LEGACY_COMPLEX",
]


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"beta parameters must be positive, got {self.a}, {self.b}")


def complete_beta(p: BetaParams) -> float:
    return math.exp(math.lgamma(p.a) + math.lgamma(p.b) - math.lgamma(p.a + p.b))


def _beta_cf(x: float, a: float, b: float, max_iter: int = 500) -> float | None:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    return None


def _regularized_scalar(x: float, a: float, b: float) -> float:
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        cf = _beta_cf(x, a, b)
        if cf is not None:
            return math.exp(log_front) * cf / a
    else:
        cf = _beta_cf(1.0 - x, b, a)
        if cf is not None:
            return 1.0 - math.exp(log_front) * cf / b
    # Continued fraction stalled: integrate the density directly.
    res = integrate_1d(
        lambda w: w ** (a - 1.0) * (1.0 - w) ** (b - 1.0),
        0.0, x, 1e-13, endpoint_sqrt="left",
    )
    return res.value / complete_beta(BetaParams(a, b))


def regularized_beta(x, p: BetaParams):
    """Regularized incomplete beta ``I_x(a, b)``; accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("incomplete beta argument must lie in [0, 1]")
    out = np.vectorize(lambda t: _regularized_scalar(float(t), p.a, p.b))(arr)
    return float(out) if out.ndim == 0 else out


def incomplete_beta(x, p: BetaParams):
    """``B_x(a, b) = int_0^x w**(a-1) (1-w)**(b-1) dw``."""
    return regularized_beta(x, p) * complete_beta(p)


def regularized_beta_half_two(nu):
    """``I_nu(1/2, 2) = (3 - nu) sqrt(nu) / 2`` on ``[0, 1]``."""
    arr = np.asarray(nu, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("nu must lie in [0, 1]")
    out = 0.5 * (3.0 - arr) * np.sqrt(arr)
    return float(out) if out.ndim == 0 else out


def dyson_ansatz(nu, beta: int):
    """Power ``beta`` of ``I_nu(1/2, 2)`` for the Dyson indices 1, 2, 4."""
    if beta not in (1, 2, 4):
        raise ValueError(f"Dyson index must be 1, 2 or 4, got {beta}")
    return regularized_beta_half_two(nu) ** beta


# Fitted constants of the earlier, non-regularized proposals.
_B_REAL = BetaParams(0.5, math.sqrt(3.0))
_B_COMPLEX = BetaParams(2.0 * math.sqrt(6.0) / 5.0, 3.0 / math.sqrt(2.0))
LEGACY_REAL = (4.0 + 1.0 / (5.0 * math.sqrt(2.0))) * complete_beta(_B_REAL) ** 8
LEGACY_COMPLEX = (
    1e8 / (2.0 * 2.0 ** (1.0 / 3.0) + 10.0 ** 0.75 / 3.0 ** (2.0 / 3.0))
    * complete_beta(_B_COMPLEX) ** 14
)


def legacy_ansatz(nu, which: str):
    """Earlier fitted curves ``const * B_nu(a, b)`` for ``which`` in {"real", "complex"}."""
    key = which.lower()
    if key == "real":
        return LEGACY_REAL * incomplete_beta(nu, _B_REAL)
    if key == "complex":
        return LEGACY_COMPLEX * incomplete_beta(nu, _B_COMPLEX)
    raise ValueError(f"unknown ansatz {which!r}")
