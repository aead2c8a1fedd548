import json
import math

import numpy as np
import pytest

from bloore import catalog
from bloore.catalog import evaluate, lookup, records
from bloore.estimators import assemble_probability
from bloore.jacobians import ansatz_integral, total_volume

WITH_S = [r for r in records() if r.has_function and r.variable is not None]
CLEAN = [r for r in WITH_S if not r.flags & {"reference-typo", "reference-inconsistent"}]
FLAGGED = [r for r in WITH_S if r.flags & {"reference-typo", "reference-inconsistent"} and r.p_derived]


def test_evaluator():
    assert evaluate("3*pi/16") == pytest.approx(3 * math.pi / 16)
    assert evaluate("sqrt(g) - 1/g", g=4.0) == pytest.approx(1.75)
    assert evaluate("-2**2") == -4
    for bad in ("__import__('os')", "g.real", "[1]", "open"):
        with pytest.raises((ValueError, KeyError, SyntaxError)):
            evaluate(bad, g=1.0)


def test_catalogue_size_and_lookup():
    assert len(records()) >= 60
    r = lookup("2x2:real:[ (2,3) ]")
    assert r.id == "2x2:real:[(2,3)]"
    with pytest.raises(KeyError):
        lookup("3x3:real:[(1,2)]")
    with pytest.raises(KeyError):
        lookup("not an id")


def test_labels():
    assert lookup("2x2:real:[(2,3)]").label == "sep"
    assert lookup("3x3:complex:[(6,8)]").label == "ppt"


@pytest.mark.parametrize("rec", CLEAN, ids=lambda r: r.id)
def test_reference_volumes_reproduce(rec):
    res = assemble_probability(rec.S, rec.c_value, rec.jacobian())
    if rec.v_tot is not None:
        assert res.v_tot == pytest.approx(rec.value("v_tot"), rel=1e-9)
    if rec.v_sep is not None:
        assert res.v_sep == pytest.approx(rec.value("v_sep"), rel=1e-8)
    if rec.p is not None:
        assert res.p == pytest.approx(rec.value("p"), rel=1e-8)


@pytest.mark.parametrize("rec", FLAGGED, ids=lambda r: r.id)
def test_derived_probabilities(rec):
    res = assemble_probability(rec.S_derived, rec.c_value, rec.jacobian())
    assert res.p == pytest.approx(rec.value("p_derived"), rel=1e-8)
    assert rec.value("p_derived") != pytest.approx(rec.value("p"), rel=1e-3)


def test_total_volume_is_c_times_simplex_mass():
    for rec in records():
        if rec.v_tot is not None and not rec.factors:
            assert rec.c_value * rec.dirichlet_total() == pytest.approx(rec.value("v_tot"), rel=1e-12), rec.id


def test_separability_functions_are_bounded_by_c():
    g = np.geomspace(1e-3, 1e3, 61)
    for rec in WITH_S:
        s = np.asarray(rec.S_derived(g))
        assert np.all(s >= -1e-12), rec.id
        assert np.all(s <= rec.c_value * (1 + 1e-12)), rec.id


def test_duality():
    g = np.geomspace(0.05, 20, 25)
    pairs = [(r, lookup(r.dual)) for r in WITH_S if r.dual]
    assert pairs
    for a, b in pairs:
        if b.has_function:
            np.testing.assert_allclose(a.S(g), b.S(1 / g), rtol=1e-12, err_msg=a.id)


@pytest.mark.parametrize("beta,name", [(1, "real two-qubit"), (2, "complex two-qubit")])
def test_two_qubit_conjectures_follow_from_ansatz(beta, name):
    con = next(c for c in catalog.conjectures() if c.name == name)
    p = evaluate(con.scale) * ansatz_integral(beta) / total_volume(beta)
    assert p == pytest.approx(con.p_value, rel=1e-9)
    for scale, alt_p, _ in con.alternates:
        assert evaluate(scale) * ansatz_integral(beta) / total_volume(beta) == pytest.approx(evaluate(alt_p), rel=1e-9)
    assert evaluate(con.v_sep) == pytest.approx(con.p_value * total_volume(beta), rel=1e-9)


def test_export_json(tmp_path):
    text = catalog.export_json(tmp_path / "cat.json")
    doc = json.loads((tmp_path / "cat.json").read_text())
    assert doc == json.loads(text)
    assert {d["id"] for d in doc["scenarios"]} == {r.id for r in records()}
    assert len(doc["conjectures"]) == 4
