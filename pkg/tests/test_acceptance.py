"""Acceptance suite: one summary line per criterion.

Run with ``pytest tests/test_acceptance.py`` or as a script. Every Monte Carlo
item uses ``SEED + k`` for its k-th case; the seed is fixed in advance.
"""

import math
import subprocess
import sys
from functools import cache
from pathlib import Path

import numpy as np
import pytest

from acceptance_log import INFO, record
from bloore.catalog import evaluate, lookup
from bloore.estimators import (
    estimate_prob,
    estimate_prob_direct,
    estimate_sepfunc,
    eta_coalescence_test,
    fit_exponent,
    upper_bound_minor_relaxation,
)
from bloore.jacobians import (
    JacobianSpec,
    ansatz_integral,
    jac_integral_quadrature,
    jac_quadrature,
    jac_real_closed,
    total_volume,
)
from bloore.specialfns import dyson_ansatz
from bloore.statespace import NumberField, ScenarioSpec, SystemSplit

pytestmark = pytest.mark.slow

SEED = 12345
N_NODE = 10**6
N_POINT = 10**6
N_DIRECT = 10**7
SIGMA = 3.0
# Checks of our own corrected values are not criteria; they use a wider band.
DERIVED_SIGMA = 4.0


# --- criterion 1 ----------------------------------------------------------------------

UNATTAINABLE = "the printed value disagrees with its own separability function; see the decisions ledger"

PRINTED = [
    ("2x2:real:[(2,3)]", "3*pi/16"),
    ("2x2:complex:[(2,3)]", "1/3"),
    ("2x2:quaternion:[(2,3)]", "1/10"),
    ("2x2:real:[(1,2),(2,3)]", "5/8"),
    ("2x2:real:[(1,4),(2,3)]", "16/(3*pi**2)"),
    ("2x2:mixed:[(1,2)c,(1,4)r]", "105*pi/512"),
    ("2x2:mixed:[(1,4)c,(2,3)r]", "135*pi/1024"),
    ("2x2:mixed:[(1,4)c,(2,4)r]", "3/8"),
    ("2x2:complex:[(1,4),(2,3)]", "2/5"),
    ("2x2:real:[(1,2),(2,3),(3,4)]", "2 - 435*pi/1024"),
    ("2x2:mixed:[(1,2)c,(2,3)r,(3,4)r]", "11/16"),
    ("2x3:real:[(1,6)]", "3*pi/16"),
    ("2x3:complex:[(2,6)]", "1/3"),
    ("2x3:real:[(1,2),(1,5)]", "5/8"),
    ("2x3:real:[(1,3),(1,6)]", "5/16"),
    ("2x3:real:[(1,4),(2,6)]", "3*pi/32"),
    ("2x3:real:[(1,5),(2,4)]", "16/(3*pi**2)"),
    ("2x3:mixed:[(1,2)c,(2,4)r]", "105*pi/512"),
    ("2x3:complex:[(1,4),(3,4)]", "2/5"),
    ("3x3:complex:[(1,6)]", "1/3"),
    ("3x3:complex:[(6,8)]", "1/6"),
    ("3x3:complex:[(2,9),(6,9)]", "7/30"),
    ("2x2x2:complex:[(1,4)]", "1/3"),
    ("4x2:complex:[(2,5),(4,7)]", "1/9"),
    ("2x2x2:complex:[(1,8),(5,7)]", "17/60"),
]


def _printed_params():
    out = []
    for k, (sid, expr) in enumerate(PRINTED):
        rec = lookup(sid)
        assert rec.p == expr, sid
        marks = [pytest.mark.xfail(strict=True, reason=UNATTAINABLE)] if rec.p_derived else []
        out.append(pytest.param(k, sid, expr, marks=marks, id=f"{sid}={expr}"))
    return out


@cache
def _scenario_probability(k: int, sid: str) -> tuple[float, float]:
    rec = lookup(sid)
    if rec.factors:
        parts = [estimate_prob(fid, var, N_NODE, SEED + 100 * k + j)[0] for j, (fid, var) in enumerate(rec.factors)]
        p = math.prod(e.p_hat for e in parts)
        return p, p * math.sqrt(sum((e.std_err / e.p_hat) ** 2 for e in parts))
    est, _ = estimate_prob(rec.spec, rec.variable, N_NODE, SEED + k)
    return est.p_hat, est.std_err


def _agree(p, se, target, sigma=SIGMA):
    z = (p - target) / se
    rel = abs(p - target) / target
    return abs(z) <= sigma and rel <= 0.01, f"{p:.6f} +- {se:.1e} vs {target:.6f} (z = {z:+.2f}, rel = {rel:.2e})"


@pytest.mark.parametrize("k,sid,expr", _printed_params())
def test_c1_printed_probability(k, sid, expr):
    p, se = _scenario_probability(k, sid)
    ok, detail = _agree(p, se, float(evaluate(expr)))
    record(1, f"{sid} P = {expr}", ok, detail)
    assert ok, detail


@pytest.mark.parametrize("k,sid", [(k, sid) for k, (sid, _) in enumerate(PRINTED) if lookup(sid).p_derived])
def test_c1_derived_probability(k, sid):
    rec = lookup(sid)
    p, se = _scenario_probability(k, sid)
    ok, detail = _agree(p, se, rec.value("p_derived"), DERIVED_SIGMA)
    INFO.append(f"{sid}: derived P = {rec.p_derived}: {detail}")
    assert ok, detail


# --- criterion 2 ----------------------------------------------------------------------

POINTWISE = [
    "2x2:real:[(2,3)]",
    "2x2:complex:[(2,3)]",
    "2x2:quaternion:[(2,3)]",
    "2x2:quaternion:[(1,4)]",
    "2x2:real:[(1,4),(2,3)]",
    "2x2:mixed:[(1,4)c,(2,3)r]",
    "2x3:mixed:[(2,3)c,(2,4)r]",
    "2x3:real:[(1,2),(2,6)]",
    "2x3:real:[(1,2),(3,4)]",
    "2x3:real:[(1,3),(1,4),(2,4)]",
    "2x3:real:[(1,2),(1,3),(3,4)]",
    "4x2:complex:[(1,3),(4,7)]",
    "3x3:complex:[(2,9),(6,9)]",
    "2x2x2:complex:[(1,4),(7,8)]",
    "2x2:mixed:[(1,2)c,(2,3)r,(3,4)r]",
    "2x3:complex:[(2,3),(3,4)]",
]
REFERENCE_INCONSISTENT = [
    "2x2x2:complex:[(1,8),(5,7)]",
    "2x2x2:complex:[(3,4),(3,8)]",
    "2x3:mixed:[(1,2)c,(3,4)r]",
]
GRID = np.geomspace(1 / 6, 6, 8)


def _pointwise(table, exact):
    z = np.where(table.std_err > 0, (table.estimate - exact) / np.where(table.std_err > 0, table.std_err, 1), 0.0)
    exact_hits = (table.std_err > 0) | np.isclose(table.estimate, exact, rtol=1e-12, atol=1e-12)
    ok = bool(np.all(np.abs(z) <= SIGMA) and np.all(exact_hits))
    worst = int(np.argmax(np.abs(z)))
    return ok, z, f"max |z| = {abs(z[worst]):.2f} at g = {GRID[worst]:.4g}"


@cache
def _table(k: int, sid: str):
    rec = lookup(sid)
    return estimate_sepfunc(rec.spec, GRID, N_POINT, SEED + k, variable=rec.variable)


@pytest.mark.parametrize("k,sid", list(enumerate(POINTWISE)), ids=POINTWISE)
def test_c2_pointwise(k, sid):
    rec = lookup(sid)
    t = _table(k, sid)
    ok, _, detail = _pointwise(t, np.asarray(rec.S(GRID)))
    record(2, sid, ok, detail)
    assert ok, detail


@pytest.mark.parametrize("k,sid", list(enumerate(REFERENCE_INCONSISTENT, start=len(POINTWISE))),
                         ids=REFERENCE_INCONSISTENT)
def test_c2_derived_functions(k, sid):
    # Not part of the criterion: our replacement functions, with the reference ones reported.
    rec = lookup(sid)
    t = _table(k, sid)
    ok_ref, _, d_ref = _pointwise(t, np.asarray(rec.S(GRID)))
    ok_der, z, d_der = _pointwise(t, np.asarray(rec.S_derived(GRID)))
    INFO.append(f"{sid}: reference S {'agrees' if ok_ref else 'disagrees'} ({d_ref}); derived S: {d_der}")
    assert np.all(np.abs(z) <= DERIVED_SIGMA), d_der


# --- criterion 3 ----------------------------------------------------------------------

IDENTITIES = [
    ("int J_real", lambda: sum(jac_integral_quadrature(JacobianSpec(1))), "pi**2/1146880"),
    ("int J_complex", lambda: sum(jac_integral_quadrature(JacobianSpec(2))), "1/1009008000"),
    ("ansatz integral, beta = 1", lambda: ansatz_integral(1), "1/151200"),
    ("ansatz integral, beta = 2", lambda: ansatz_integral(2), "71/99891792000"),
    ("ansatz integral, beta = 4", lambda: ansatz_integral(4), "5989/358347086242825680000"),
    ("total volume, real", lambda: total_volume(1), "pi**4/60480"),
    ("total volume, complex", lambda: total_volume(2), "pi**6/851350500"),
]


@pytest.mark.parametrize("name,fn,expr", IDENTITIES, ids=[i[0] for i in IDENTITIES])
def test_c3_identity(name, fn, expr):
    value, target = fn(), float(evaluate(expr))
    rel = abs(value - target) / target
    record(3, f"{name} = {expr}", rel <= 1e-6, f"rel error {rel:.1e}")
    assert rel <= 1e-6


@pytest.mark.parametrize("nu", [0.25, 0.5, 2.0, 4.0])
def test_c3_closed_form_jacobian(nu):
    q, c = jac_quadrature(nu, JacobianSpec(1)), jac_real_closed(nu, radius=0.0)
    rel = abs(q - c) / c
    record(3, f"J_real({nu}) quadrature vs closed form", rel <= 1e-8, f"rel error {rel:.1e}")
    assert rel <= 1e-8


# --- criterion 4 ----------------------------------------------------------------------

EVIDENCE = "reported as evidence against the conjecture; see the decisions ledger"
DIRECT = [
    pytest.param(0, 4, NumberField.REAL, SystemSplit.TWO_QUBIT, "8/17", id="4-real",
                 marks=pytest.mark.xfail(strict=True, reason=EVIDENCE)),
    pytest.param(1, 4, NumberField.COMPLEX, SystemSplit.TWO_QUBIT, "8/33", id="4-complex"),
    pytest.param(2, 6, NumberField.COMPLEX, SystemSplit.QUBIT_QUTRIT, "32/1199", id="6-complex",
                 marks=pytest.mark.xfail(strict=True, reason=EVIDENCE)),
    pytest.param(3, 6, NumberField.REAL, SystemSplit.QUBIT_QUTRIT, "32/213", id="6-real",
                 marks=pytest.mark.xfail(strict=True, reason=EVIDENCE)),
]


@pytest.mark.parametrize("k,n,fld,split,expr", DIRECT)
def test_c4_conjecture(k, n, fld, split, expr):
    target = float(evaluate(expr))
    est = estimate_prob_direct(n, fld, split, N_DIRECT, SEED + k, shards=10, target=target)
    ok = abs(est.z_score) <= SIGMA
    detail = f"{est.p_hat:.6f} +- {est.std_err:.1e} vs {target:.6f} (z = {est.z_score:+.1f})"
    record(4, f"{n}x{n} {fld.label} P = {expr}", ok, detail)
    assert ok, detail


# --- criterion 5 ----------------------------------------------------------------------

def test_c5_dyson_ansatz_complex_two_qubit():
    spec = ScenarioSpec.full(SystemSplit.TWO_QUBIT, NumberField.COMPLEX)
    grid = np.unique(np.append(np.geomspace(0.05, 1.0, 12), 1.0))
    t = estimate_sepfunc(spec, grid, N_POINT, SEED, sampler="correlation")
    norm = t.normalized / t.normalized[grid == 1.0][0]
    dev = float(np.max(np.abs(norm - dyson_ansatz(grid, 2))))
    record(5, "complex two-qubit S / S(1) vs I_nu(1/2,2)^2", dev <= 0.02, f"sup deviation {dev:.4f}")
    assert dev <= 0.02


def test_c5_real_qubit_qutrit_exponent():
    spec = ScenarioSpec.full(SystemSplit.QUBIT_QUTRIT, NumberField.REAL)
    vals = np.geomspace(0.125, 1.0, 4)
    pairs = np.array([(a, b) for a in vals for b in vals])
    t = estimate_sepfunc(spec, pairs, N_POINT, SEED + 1, variable="nu1,nu2", sampler="correlation",
                         common_draws=False)
    x, ssr = fit_exponent(t)
    chi2 = eta_coalescence_test(t)
    ok = 0.45 <= x <= 0.55
    record(5, "real qubit-qutrit exponent in [0.45, 0.55]", ok, f"x* = {x:.4f} (SSR {ssr:.3g})")
    INFO.append(f"real qubit-qutrit: reduced chi-square for dependence on nu1*nu2 alone = {chi2:.1f}")
    assert ok


# --- criterion 6 ----------------------------------------------------------------------

C16 = 512 * math.pi**2 / 27


def _s_approx_z14(nu):
    nu = np.asarray(nu, dtype=float)
    return np.where(nu <= 1, C16, 256 * (3 * math.pi**2 * nu - math.pi**2) / (27 * nu**1.5))


def _s_approx_z23(nu):
    nu = np.asarray(nu, dtype=float)
    return np.where(nu >= 1, C16, 256 / 27 * math.pi**2 * (3 - nu) * np.sqrt(nu))


@pytest.mark.parametrize("k,which,formula,bound", [
    (0, "z14", _s_approx_z14, "1/2 + 512/(135*pi**2)"),
    (1, "combined", None, "1024/(135*pi**2)"),
    (2, "z23", _s_approx_z23, None),
])
def test_c6_minor_relaxation(k, which, formula, bound):
    est, table = upper_bound_minor_relaxation(which, N_POINT, SEED + k, grid=GRID)
    ok = True
    if formula is not None:
        s, se = 16 * table.estimate, 16 * table.std_err
        z = (s - formula(GRID)) / np.where(se > 0, se, np.inf)
        good = bool(np.all(np.abs(z) <= SIGMA))
        record(6, f"S_approx({which}) pointwise", good, f"max |z| = {np.max(np.abs(z)):.2f}")
        ok &= good
    if bound is not None:
        target = float(evaluate(bound))
        rel = abs(est.p_hat - target) / target
        record(6, f"bound from {which} = {bound}", rel <= 0.01,
               f"{est.p_hat:.5f} +- {est.std_err:.1e} vs {target:.5f} (rel {rel:.1e})")
        ok &= rel <= 0.01
    assert ok


# --- criterion 7 ----------------------------------------------------------------------

def test_c7_property_suite_standalone():
    here = Path(__file__).parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           str(here / "test_properties.py")], capture_output=True, text=True, cwd=here.parent)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record(7, "tests/test_properties.py run on its own", proc.returncode == 0, tail)
    assert proc.returncode == 0, proc.stdout[-2000:]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-rA"]))
