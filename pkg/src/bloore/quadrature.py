"""Adaptive Gauss-Kronrod quadrature in one and two dimensions.

The integrand is always called with a numpy array of abscissae and must return
an array of the same shape, so one call evaluates every node of every interval
being refined in a given round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["QuadResult", "integrate_1d", "integrate_2d"]

# 15-point Kronrod extension of the 7-point Gauss rule (nodes on [0, 1) half).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5]] = _WG[:3]
_WEIGHTS_G[[9, 11, 13]] = _WG[2::-1]
_WEIGHTS_G[7] = _WG[3]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    """Outcome of an adaptive integration."""

    value: float
    est_error: float
    evaluations: int
    converged: bool = True

    def __float__(self) -> float:
        return self.value


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k = half * (fx @ _WEIGHTS_K)
    g = half * (fx @ _WEIGHTS_G)
    err = np.abs(k - g)
    # Round-off floor so that tiny intervals are not bisected forever.
    floor = 50.0 * _EPS * half * (np.abs(fx) @ _WEIGHTS_K)
    return k, np.maximum(err, floor)


def _transform(f, a: float, b: float, endpoint_sqrt: str | None):
    """Map ``(a, b)`` onto finite edges, applying ``x = t**2`` substitutions.

    Returns the transformed integrand and the initial partition.
    """
    if np.isinf(a) and np.isinf(b):
        def g(t):
            return f(t / (1.0 - t * t)) * (1.0 + t * t) / (1.0 - t * t) ** 2
        return g, [-1.0, 0.0, 1.0]
    if np.isinf(b):
        def g(t):
            return f(a + t / (1.0 - t)) / (1.0 - t) ** 2
        return _transform(g, 0.0, 1.0, endpoint_sqrt)
    if np.isinf(a):
        def g(t):
            return f(b - t / (1.0 - t)) / (1.0 - t) ** 2
        flip = {"left": "right", "right": "left"}.get(endpoint_sqrt, endpoint_sqrt)
        return _transform(g, 0.0, 1.0, flip)

    width = b - a
    if endpoint_sqrt is None:
        return f, [a, b]
    if endpoint_sqrt == "left":
        return (lambda t: f(a + width * t * t) * 2.0 * width * t), [0.0, 1.0]
    if endpoint_sqrt == "right":
        return (lambda t: f(b - width * t * t) * 2.0 * width * t), [0.0, 1.0]
    if endpoint_sqrt == "both":
        hw = 0.5 * width

        def g(t):
            s = np.abs(t)
            x = np.where(t < 0.0, a + hw * s * s, b - hw * s * s)
            return f(x) * 2.0 * hw * s

        return g, [-1.0, 0.0, 1.0]
    raise ValueError(f"unknown endpoint_sqrt option {endpoint_sqrt!r}")


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    *,
    abs_tol: float = 1e-15,
    endpoint_sqrt: str | None = None,
    breakpoints: tuple[float, ...] = (),
    max_intervals: int = 4000,
) -> QuadResult:
    """Integrate a vectorised function over ``[a, b]``.

    Parameters
    ----------
    f
        Callable taking and returning 1-D float arrays.
    a, b
        Limits; either may be infinite.
    rel_tol, abs_tol
        Stop once the summed local error is below ``max(abs_tol, rel_tol*|I|)``.
    endpoint_sqrt
        ``"left"``, ``"right"`` or ``"both"`` applies ``x = t**2`` towards that
        end, which turns ``x**p`` singularities into smooth integrands.
    breakpoints
        Interior points where the integrand has kinks; the initial partition
        is split there.
    max_intervals
        Refinement budget. On exhaustion the best estimate is returned with
        ``converged=False``.
    """
    if not a < b:
        raise ValueError("integration requires a < b")
    g, edges = _transform(f, float(a), float(b), endpoint_sqrt)
    if breakpoints and endpoint_sqrt is None and np.isfinite(a) and np.isfinite(b):
        edges = [a, *sorted(p for p in breakpoints if a < p < b), b]
    los = np.array(edges[:-1], dtype=float)
    his = np.array(edges[1:], dtype=float)
    vals, errs = _gk15(g, los, his)
    evals = 15 * len(los)

    while True:
        total = float(vals.sum())
        target = max(abs_tol, rel_tol * abs(total))
        err = float(errs.sum())
        if err <= target:
            return QuadResult(total, err, evals, True)
        if len(los) >= max_intervals:
            return QuadResult(total, err, evals, False)
        share = target / len(los)
        pick = errs > share
        if not pick.any():
            pick[np.argmax(errs)] = True
        room = max_intervals - len(los)
        idx = np.flatnonzero(pick)
        if len(idx) > room:
            idx = idx[np.argsort(errs[idx])[::-1][:room]]
        mids = 0.5 * (los[idx] + his[idx])
        new_lo = np.concatenate([los[idx], mids])
        new_hi = np.concatenate([mids, his[idx]])
        nv, ne = _gk15(g, new_lo, new_hi)
        evals += 15 * len(new_lo)
        keep = np.ones(len(los), dtype=bool)
        keep[idx] = False
        los = np.concatenate([los[keep], new_lo])
        his = np.concatenate([his[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        order = np.argsort(los, kind="stable")
        los, his, vals, errs = los[order], his[order], vals[order], errs[order]


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float],
    y_range: tuple[float | Callable, float | Callable] | str,
    rel_tol: float = 1e-9,
    *,
    abs_tol: float = 1e-15,
    endpoint_sqrt: tuple[str | None, str | None] = (None, None),
    max_intervals: int = 2000,
) -> QuadResult:
    """Iterated adaptive integral of ``f(x, y)``.

    ``y_range`` is either a pair whose entries are constants or callables of
    ``x``, or the string ``"simplex"`` meaning ``0 <= y <= x_hi - x`` (the unit
    simplex when ``x_range = (0, 1)``).
    """
    if isinstance(y_range, str):
        if y_range != "simplex":
            raise ValueError(f"unknown domain {y_range!r}")
        top = x_range[1]
        y_lo, y_hi = (lambda x: 0.0), (lambda x: top - x)
    else:
        y_lo, y_hi = (
            lim if callable(lim) else (lambda x, c=float(lim): c) for lim in y_range
        )

    inner_tol = rel_tol * 0.1
    count = [0]
    ok = [True]

    def outer(xs: np.ndarray) -> np.ndarray:
        out = np.empty(xs.shape)
        for k, x in enumerate(xs):
            lo, hi = y_lo(x), y_hi(x)
            if not hi > lo:
                out[k] = 0.0
                continue
            res = integrate_1d(
                lambda y: f(np.full_like(y, x), y),
                lo,
                hi,
                inner_tol,
                abs_tol=abs_tol * 0.1,
                endpoint_sqrt=endpoint_sqrt[1],
                max_intervals=max_intervals,
            )
            count[0] += res.evaluations
            ok[0] &= res.converged
            out[k] = res.value
        return out

    res = integrate_1d(
        outer,
        x_range[0],
        x_range[1],
        rel_tol,
        abs_tol=abs_tol,
        endpoint_sqrt=endpoint_sqrt[0],
        max_intervals=max_intervals,
    )
    return QuadResult(res.value, res.est_error, count[0], res.converged and ok[0])
