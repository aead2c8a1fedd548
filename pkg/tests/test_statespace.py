import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bloore.statespace import (
    BlooreParams,
    GridVariable,
    NumberField,
    RatioVars,
    ScenarioSpec,
    SystemSplit,
    assemble_density,
    canonical_diag,
    ratio_variables,
    solve_rho33_for_nu,
)

SPLITS = list(SystemSplit)


def test_field_parsing():
    assert NumberField.parse("Complex") is NumberField.COMPLEX
    assert [f.d_f for f in NumberField] == [1, 2, 4]
    with pytest.raises(ValueError):
        NumberField.parse("octonion")


def test_split_ratio_names():
    assert SystemSplit.TWO_QUBIT.ratio_names == ("nu",)
    assert SystemSplit.QUBIT_QUTRIT.ratio_names == ("nu1", "nu2")
    assert len(SystemSplit.QUTRIT_QUTRIT.ratio_names) == 4
    assert SystemSplit.parse("2x2x2") is SystemSplit.TWO_TWO_TWO


@pytest.mark.parametrize("split,pair,moved", [
    (SystemSplit.TWO_QUBIT, (2, 3), (1, 4)),
    (SystemSplit.TWO_QUBIT, (1, 2), (2, 1)),
    (SystemSplit.QUBIT_QUTRIT, (2, 6), (3, 5)),
    (SystemSplit.QUBIT_QUTRIT, (1, 6), (3, 4)),
    (SystemSplit.FOUR_TWO, (3, 5), (1, 7)),
    (SystemSplit.TWO_TWO_TWO, (1, 4), (2, 3)),
])
def test_pt_position(split, pair, moved):
    assert split.pt_position(*pair) == moved


def test_scenario_ids_round_trip():
    for text in ["2x2:real:[(2,3)]", "2x3:complex:[(1,2),(3,4)]", "2x2:mixed:[(1,2)c,(1,4)r]",
                 "2x2x2:complex:[(1,8),(5,7)]", "2x2:quaternion:[(1,4)]"]:
        assert ScenarioSpec.from_id(text).id == text
    assert ScenarioSpec.from_id("2x2:real:[ (3,4), (1,2) ]").id == "2x2:real:[(1,2),(3,4)]"


@pytest.mark.parametrize("bad", ["2x2:real:[(3,2)]", "2x2:real:[(1,5)]", "2x2:real:[(1,2),(1,2)]",
                                 "9x9:real:[(1,2)]", "2x2:mixed:[(1,2)]"])
def test_bad_ids(bad):
    with pytest.raises(ValueError):
        ScenarioSpec.from_id(bad)


def test_scenario_counts():
    full = ScenarioSpec.full(SystemSplit.QUBIT_QUTRIT, NumberField.REAL)
    assert full.m == 0 and len(full.pairs) == 15
    one = ScenarioSpec.from_id("2x3:complex:[(1,5)]")
    assert one.m == 14 and one.box_measure == 4.0


def test_assemble_density():
    spec = ScenarioSpec.from_id("2x2:complex:[(1,4),(2,3)]")
    d = np.array([0.1, 0.2, 0.3, 0.4])
    rho = assemble_density(BlooreParams(d, {(1, 4): 0.5 + 0.2j, (2, 3): -0.3j}), spec)
    assert rho.is_self_adjoint()
    assert rho.trace() == pytest.approx(1.0)
    assert rho.data[0, 3] == pytest.approx((0.5 + 0.2j) * math.sqrt(0.04))
    with pytest.raises(ValueError):
        assemble_density(BlooreParams(d, {(1, 4): 0.9 + 0.9j, (2, 3): 0.0}), spec)
    with pytest.raises(ValueError):
        BlooreParams([0.5, 0.6, 0.0, 0.0])


def test_quaternionic_density_is_self_adjoint():
    spec = ScenarioSpec.from_id("2x2:quaternion:[(2,3)]")
    rho = assemble_density(BlooreParams(np.full(4, 0.25), {(2, 3): np.array([0.1, 0.2, -0.3, 0.4])}), spec)
    assert rho.is_self_adjoint()
    assert rho.as_complex().shape == (8, 8)


def test_canonical_diag_two_qubits():
    np.testing.assert_allclose(canonical_diag(SystemSplit.TWO_QUBIT, [4.0]), [1 / 3, 1 / 6, 1 / 6, 1 / 3])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPLITS), st.lists(st.floats(0.05, 20.0), min_size=4, max_size=4))
def test_canonical_diag_realises_ratios(split, raw):
    vals = raw[: len(split.ratio_names)]
    d = canonical_diag(split, vals)
    assert d.sum() == pytest.approx(1.0) and np.all(d > 0)
    np.testing.assert_allclose(ratio_variables(d, split).values, vals, rtol=1e-10)


def test_ratio_vars_shorthands():
    r = RatioVars(SystemSplit.QUBIT_QUTRIT, (2.0, 3.0))
    assert r.eta == 6.0 and r["nu2"] == 3.0
    assert RatioVars(SystemSplit.TWO_QUBIT, (4.0,)).mu == 2.0
    with pytest.raises(AttributeError):
        RatioVars(SystemSplit.TWO_QUBIT, (4.0,)).eta


@pytest.mark.parametrize("split,expr,entries", [
    (SystemSplit.QUBIT_QUTRIT, "eta", (1, 6, 3, 4)),
    (SystemSplit.TWO_TWO_TWO, "nu1*nu3/nu2", (1, 8, 2, 7)),
    (SystemSplit.TWO_TWO_TWO, "nu3/nu2", (3, 8, 4, 7)),
    (SystemSplit.FOUR_TWO, "nu1*nu2", (1, 7, 3, 5)),
    (SystemSplit.QUTRIT_QUTRIT, "nu2*nu4", (2, 9, 3, 8)),
])
def test_grid_variable_entries(split, expr, entries):
    gv = GridVariable(split, expr)
    a, b, c, d = gv.four_entries()
    assert {a, b} == set(entries[:2]) and {c, d} == set(entries[2:])
    diag = gv.diag_for(2.5)
    assert gv.value(diag) == pytest.approx(2.5)
    assert diag[a - 1] * diag[b - 1] / (diag[c - 1] * diag[d - 1]) == pytest.approx(2.5)


def test_grid_variable_rejects_nonsense():
    with pytest.raises(ValueError):
        GridVariable(SystemSplit.TWO_QUBIT, "nu3").ratio_exponents
    with pytest.raises(ValueError):
        GridVariable(SystemSplit.QUBIT_QUTRIT, "nu1*nu2*nu1").four_entries()


def test_solve_rho33_derivative():
    r33, r44, deriv = solve_rho33_for_nu(0.2, 0.3, 1.7)
    assert 0.2 * r44 / (0.3 * r33) == pytest.approx(1.7)
    h = 1e-6
    fd = (solve_rho33_for_nu(0.2, 0.3, 1.7 + h)[0] - solve_rho33_for_nu(0.2, 0.3, 1.7 - h)[0]) / (2 * h)
    assert deriv == pytest.approx(fd, rel=1e-7)
