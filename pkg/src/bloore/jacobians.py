"""Marginal jacobians: the Bloore volume weight pushed forward to a ratio variable.

For a ratio ``nu = rho_a rho_b / (rho_c rho_d)`` and a diagonal weight
``prod rho_i**e_i``, the marginal jacobian is the density of ``nu`` times the
total weight. With the two-qubit labelling (numerator entries 1 and 4,
denominator entries 2 and 3) it is

    J(nu) = iint rho11^e1 rho22^e2 rho33^e3 rho44^e4 |d rho33 / d nu| d rho11 d rho22.

Writing ``rho11 = s u`` and ``rho22 = s (1 - u)`` separates the double
integral into a beta function and a one-dimensional integral over ``u``,
which is what :func:`marginal_jacobian` evaluates. :func:`jac_quadrature`
keeps the literal two-dimensional form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import QuadResult, integrate_1d, integrate_2d
from .specialfns import regularized_beta_half_two
from .statespace import SystemSplit

__all__ = [
    "JacobianSpec",
    "C_REAL",
    "C_COMPLEX",
    "jac_real_closed",
    "jac_series",
    "marginal_jacobian",
    "jac_quadrature",
    "jac_integral",
    "jac_integral_quadrature",
    "jac_14_23_closed",
    "ansatz_integral",
    "total_volume",
    "QuadratureError",
]

C_REAL = 512.0 * math.pi**2 / 27.0
C_COMPLEX = 32.0 * math.pi**6 / 27.0


class QuadratureError(RuntimeError):
    def __init__(self, message: str, result: QuadResult):
        super().__init__(f"{message} (value {result.value:.6g}, est. error {result.est_error:.3g})")
        self.result = result


@dataclass(frozen=True)
class JacobianSpec:
    """Diagonal weight exponents for one ratio variable.

    ``exponents`` are ``(e1, e2, e3, e4)`` on the two-qubit labels, i.e. on
    the numerator entry, first denominator entry, second denominator entry
    and second numerator entry. By default all equal ``3*beta/2``, the full
    Bloore weight. ``scale`` multiplies the result, accounting for diagonal
    entries integrated out elsewhere.
    """

    beta: int = 1
    split: SystemSplit = SystemSplit.TWO_QUBIT
    exponents: tuple[float, float, float, float] | None = None
    scale: float = 1.0
    _e: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        e = self.exponents if self.exponents is not None else (1.5 * self.beta,) * 4
        if len(e) != 4 or min(e) <= -1:
            raise ValueError("need four exponents greater than -1")
        object.__setattr__(self, "_e", tuple(float(x) for x in e))

    @property
    def e(self) -> tuple[float, float, float, float]:
        return self._e  # type: ignore[return-value]

    @property
    def reduced(self) -> tuple[float, float, float, float]:
        """``(B, A, Bp, p)``: prefactor beta value and the ``u``-integral exponents."""
        e1, e2, e3, e4 = self.e
        pref = math.exp(math.lgamma(e1 + e2 + 2) + math.lgamma(e3 + e4 + 2)
                        - math.lgamma(e1 + e2 + e3 + e4 + 4))
        return pref, e1 + e3 + 1, e2 + e4 + 1, e3 + e4 + 2

    def swapped(self) -> "JacobianSpec":
        """Spec of ``1/nu``: ``J_swapped(x) = J(1/x) / x**2``."""
        e1, e2, e3, e4 = self.e
        return JacobianSpec(self.beta, self.split, (e2, e1, e4, e3), self.scale)

    @classmethod
    def for_weights(cls, alphas, entries: tuple[int, int, int, int]) -> "JacobianSpec":
        """Spec for ``rho_a rho_b / (rho_c rho_d)`` under a Dirichlet-type weight.

        ``alphas[i]`` is one plus the exponent of diagonal entry ``i+1``;
        ``entries`` is ``(a, b, c, d)``. The scale restores the mass of the
        remaining entries so that the integral equals the full weight's total.
        """
        alphas = np.asarray(alphas, dtype=float)
        a, b, c, d = entries
        e = (alphas[a - 1] - 1, alphas[c - 1] - 1, alphas[d - 1] - 1, alphas[b - 1] - 1)
        sub = np.array([alphas[a - 1], alphas[b - 1], alphas[c - 1], alphas[d - 1]])
        log_all = np.sum([math.lgamma(x) for x in alphas]) - math.lgamma(alphas.sum())
        log_sub = np.sum([math.lgamma(x) for x in sub]) - math.lgamma(sub.sum())
        return cls(1, SystemSplit.TWO_QUBIT, e, math.exp(log_all - log_sub))


def jac_series(nu, spec: JacobianSpec = JacobianSpec(), terms: int = 90):
    """Expansion of the marginal jacobian about ``nu = 1``; converges for ``|nu-1| < 1``."""
    nu = np.asarray(nu, dtype=float)
    pref, A, Bp, p = spec.reduced
    x = nu - 1.0
    term = np.full_like(nu, math.exp(math.lgamma(A + 1) + math.lgamma(Bp + 1)
                                     - math.lgamma(A + Bp + 2)))
    total = term.copy()
    for k in range(terms - 1):
        term = term * (-(p + k) * x / (k + 1)) * (Bp + k + 1) / (A + Bp + k + 2)
        total += term
    out = spec.scale * pref * nu ** spec.e[3] * total
    return float(out) if out.ndim == 0 else out


SERIES_RADIUS = 0.6


def _jac_real_formula(v):
    return v**1.5 * (
        12 * (v * (v + 2) * (v**2 + 14 * v + 8) + 1) * np.log(np.sqrt(v))
        - 5 * (5 * v**4 + 32 * v**3 - 32 * v - 5)
    ) / (3780 * (v - 1) ** 9)


def jac_real_closed(nu, radius: float = SERIES_RADIUS):
    """Closed-form real two-qubit jacobian, with a series branch near ``nu = 1``.

    The closed form divides by ``(nu - 1)**9`` and its numerator cancels to
    the same order, so it keeps nine digits only for ``|nu - 1| > 0.6`` or
    so; inside that radius the expansion about one takes over.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0):
        raise ValueError("nu must be positive")
    near = np.abs(nu - 1.0) < radius
    out = np.empty_like(nu)
    out[~near] = _jac_real_formula(nu[~near])
    if near.any():
        out[near] = jac_series(nu[near], JacobianSpec(1))
    return float(out) if out.ndim == 0 else out


def jac_14_23_closed(nu, radius: float = SERIES_RADIUS):
    """Jacobian of the real ``[(1,4),(2,3)]`` scenario (weight ``(prod rho)**(1/2)``).

    ``sqrt(nu) (3 - 3 nu^2 + (nu^2 + 4 nu + 1) log nu) / (30 (nu - 1)^5)``.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0):
        raise ValueError("nu must be positive")
    near = np.abs(nu - 1.0) < radius
    out = np.empty_like(nu)
    v = nu[~near]
    out[~near] = np.sqrt(v) * (3 - 3 * v**2 + (v * (v + 4) + 1) * np.log(v)) / (30 * (v - 1) ** 5)
    if near.any():
        out[near] = jac_series(nu[near], JacobianSpec(1, exponents=(0.5,) * 4))
    return float(out) if out.ndim == 0 else out


def _log_integral(nu: float, spec: JacobianSpec, rel_tol: float) -> QuadResult:
    """``int_0^1 u^A (1-u)^Bp (u + nu (1-u))^-p du`` after ``u = r/(1+r)``, ``r = e^x``.

    In ``x`` the integrand is a pair of smooth bumps near ``x = 0`` and
    ``x = log nu`` with exponential tails, so it behaves for any ``nu``.
    """
    _, A, _, p = spec.reduced
    c = spec.e[0] + spec.e[1] + 2.0
    log_nu = math.log(nu)

    def f(x):
        return np.exp((A + 1.0) * x - p * np.logaddexp(x, log_nu) - c * np.logaddexp(0.0, x))

    lo, hi = min(0.0, log_nu), max(0.0, log_nu)
    mid = integrate_1d(f, lo - 1.0, hi + 1.0, rel_tol, abs_tol=0.0)
    floor = rel_tol * abs(mid.value)
    parts = [integrate_1d(f, -np.inf, lo - 1.0, rel_tol, abs_tol=floor), mid,
             integrate_1d(f, hi + 1.0, np.inf, rel_tol, abs_tol=floor)]
    return QuadResult(sum(r.value for r in parts), sum(r.est_error for r in parts),
                      sum(r.evaluations for r in parts), all(r.converged for r in parts))


def marginal_jacobian(nu, spec: JacobianSpec = JacobianSpec(), rel_tol: float = 1e-12):
    """Marginal jacobian via the separated one-dimensional integral."""
    arr = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(arr <= 0):
        raise ValueError("nu must be positive")
    pref = spec.reduced[0]
    out = np.empty_like(arr)
    for k, v in enumerate(arr):
        res = _log_integral(v, spec, rel_tol)
        if not res.converged:
            raise QuadratureError("jacobian integral did not converge", res)
        out[k] = spec.scale * pref * v ** spec.e[3] * res.value
    return float(out[0]) if np.ndim(nu) == 0 else out


def jac_quadrature(nu: float, spec: JacobianSpec = JacobianSpec(), rel_tol: float = 1e-10) -> float:
    """Marginal jacobian as the literal double integral over ``(rho11, rho22)``."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    e1, e2, e3, e4 = spec.e

    def f(r11, r22):
        out = np.zeros_like(r11)
        ok = (r11 > 0) & (r22 > 0) & (r11 + r22 < 1)
        a, b = r11[ok], r22[ok]
        rest = 1.0 - a - b
        den = a + nu * b
        r33 = a * rest / den
        r44 = rest - r33
        dr = a * b * rest / den**2
        out[ok] = a**e1 * b**e2 * r33**e3 * r44**e4 * dr
        return out

    # Bring the integrand to unit scale so the absolute floor stays negligible.
    unit = float(f(np.array([0.3]), np.array([0.3]))[0])
    res = integrate_2d(lambda x, y: f(x, y) / unit, (0.0, 1.0), "simplex", rel_tol,
                       abs_tol=1e-15, endpoint_sqrt=("both", "both"))
    if not res.converged:
        raise QuadratureError("jacobian double integral did not converge", res)
    return spec.scale * unit * res.value


def jac_integral(spec: JacobianSpec = JacobianSpec()) -> float:
    """Exact ``int_0^inf J``: a Dirichlet normaliser."""
    alphas = [x + 1.0 for x in spec.e]
    return spec.scale * math.exp(sum(math.lgamma(a) for a in alphas) - math.lgamma(sum(alphas)))


def jac_integral_quadrature(spec: JacobianSpec = JacobianSpec(), rel_tol: float = 1e-11) -> tuple[float, float]:
    """``(int_0^1 J, int_1^inf J)`` by quadrature.

    The tail uses ``nu -> 1/nu``, which maps ``J`` onto the jacobian with
    numerator and denominator roles exchanged.
    """
    parts = []
    for sp in (spec, spec.swapped()):
        res = integrate_1d(lambda x, sp=sp: marginal_jacobian(x, sp, rel_tol * 0.1),
                           0.0, 1.0, rel_tol, abs_tol=0.0, endpoint_sqrt="left")
        if not res.converged:
            raise QuadratureError("jacobian integral did not converge", res)
        parts.append(res.value)
    return parts[0], parts[1]


def ansatz_integral(beta: int, rel_tol: float = 1e-10) -> float:
    """``2 int_0^1 J_beta(nu) I_nu(1/2, 2)**beta d nu``."""
    spec = JacobianSpec(beta)
    res = integrate_1d(
        lambda v: marginal_jacobian(v, spec, rel_tol * 0.01) * regularized_beta_half_two(v) ** beta,
        0.0, 1.0, rel_tol, abs_tol=0.0, endpoint_sqrt="left",
    )
    if not res.converged:
        raise QuadratureError("ansatz integral did not converge", res)
    return 2.0 * res.value


def total_volume(beta: int) -> float:
    """Total HS volume ``C_beta * int J_beta`` for real (1) or complex (2) two-qubit states."""
    consts = {1: C_REAL, 2: C_COMPLEX}
    if beta not in consts:
        raise ValueError("total volume is tabulated for beta = 1 or 2")
    return consts[beta] * jac_integral(JacobianSpec(beta))
