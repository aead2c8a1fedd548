"""Registry of exact scenario results and conjectured full-state probabilities.

Every quantity is kept as an exact expression string (``"3*pi/16"``) and
evaluated on demand by a small arithmetic evaluator. Separability functions
are lists of pieces over the grid variable ``g``; each piece is either an
expression in ``g`` or the name of a transcendental evaluator registered in
:data:`FORMULAS`.
"""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .estimators import dirichlet_alphas, scenario_jacobian
from .jacobians import JacobianSpec
from .statespace import ScenarioSpec

__all__ = [
    "Piece",
    "ScenarioRecord",
    "ConjectureRecord",
    "FORMULAS",
    "evaluate",
    "lookup",
    "records",
    "conjectures",
    "export_json",
]


# --- expression evaluation ------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {
    "sqrt": np.sqrt,
    "log": np.log,
    "exp": np.exp,
    "acos": np.arccos,
    "asin": np.arcsin,
    "atan": np.arctan,
}
_CONSTS = {"pi": math.pi}


def evaluate(expr: str, **names):
    """Evaluate an arithmetic expression with ``pi``, ``sqrt``, ``log``... and given names."""

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name):
            if node.id in names:
                return names[node.id]
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise ValueError(f"unknown name {node.id!r} in {expr!r}")
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ValueError(f"unsupported syntax in {expr!r}")

    return walk(ast.parse(expr, mode="eval"))


# --- transcendental pieces ------------------------------------------------------

def _arc_cos_form(g):
    """``2 (acos(sqrt(1 - 1/g)) + sqrt(g - 1)/g)`` for ``g >= 1``."""
    return 2.0 * (np.arccos(np.sqrt(1.0 - 1.0 / g)) + np.sqrt(g - 1.0) / g)


def _arg_log_form(g):
    """Real form of the complex-logarithm piece, ``g >= 1``.

    ``i log((sqrt(g-1) + i)/sqrt(g))`` equals ``-asin(1/sqrt(g))`` on the
    principal branch, which leaves
    ``4 sqrt(1 - 1/g) - 2 (sqrt(g - 1) - g asin(1/sqrt g)) / sqrt(g)``.
    """
    root = np.sqrt(g - 1.0)
    arg = -np.arcsin(1.0 / np.sqrt(g))
    return 4.0 * np.sqrt(1.0 - 1.0 / g) - 2.0 * (arg * g + root) / np.sqrt(g)


def _arc_sec_form(g):
    """``pi/3 (3 asec(sqrt g) + 4 sqrt g + sqrt(g-1)/g - 4 sqrt(g-1))`` for ``g >= 1``."""
    root = np.sqrt(g - 1.0)
    return math.pi / 3.0 * (3.0 * np.arccos(1.0 / np.sqrt(g)) + 4.0 * np.sqrt(g) + root / g - 4.0 * root)


def _arc_sin_form(g):
    """``pi (4 g^1.5 + (3 asin(sqrt(1-1/g)) - 4 sqrt(g-1)) g + sqrt(g-1)) / (3 g)``."""
    root = np.sqrt(g - 1.0)
    return math.pi * (4.0 * g**1.5 + (3.0 * np.arcsin(np.sqrt(1.0 - 1.0 / g)) - 4.0 * root) * g + root) / (3.0 * g)


def _cos_minus_sin_form(g):
    """``pi (acos(sqrt(1-1/g)) - asin(1/sqrt g)) g + pi^2 - pi^2/(2g)``; the bracket vanishes."""
    bracket = np.arccos(np.sqrt(1.0 - 1.0 / g)) - np.arcsin(1.0 / np.sqrt(g))
    return math.pi * bracket * g + math.pi**2 - math.pi**2 / (2.0 * g)


FORMULAS = {
    "arc_cos_form": _arc_cos_form,
    "arg_log_form": _arg_log_form,
    "arc_sec_form": _arc_sec_form,
    "arc_sin_form": _arc_sin_form,
    "cos_minus_sin_form": _cos_minus_sin_form,
}

_DOMAINS = {
    "<=1": lambda g: g <= 1.0,
    "<1": lambda g: g < 1.0,
    "==1": lambda g: g == 1.0,
    ">=1": lambda g: g >= 1.0,
    ">1": lambda g: g > 1.0,
    "all": lambda g: np.ones_like(g, dtype=bool),
}


@dataclass(frozen=True)
class Piece:
    domain: str
    formula: str

    def __post_init__(self) -> None:
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.formula.startswith("@") and self.formula[1:] not in FORMULAS:
            raise ValueError(f"unknown named formula {self.formula!r}")

    def evaluate(self, g: np.ndarray) -> np.ndarray:
        if self.formula.startswith("@"):
            return FORMULAS[self.formula[1:]](g)
        out = evaluate(self.formula, g=g)
        return np.broadcast_to(np.asarray(out, dtype=float), g.shape).copy()


def _eval_pieces(pieces, g):
    arr = np.atleast_1d(np.asarray(g, dtype=float))
    if np.any(arr <= 0):
        raise ValueError("grid variable must be positive")
    out = np.full(arr.shape, np.nan)
    todo = np.ones(arr.shape, dtype=bool)
    for piece in pieces:
        sel = todo & _DOMAINS[piece.domain](arr)
        if sel.any():
            out[sel] = piece.evaluate(arr[sel])
            todo &= ~sel
    if todo.any():
        raise ValueError("separability function undefined at some points")
    return float(out[0]) if np.ndim(g) == 0 else out


# --- records -----------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioRecord:
    """Exact results for one scenario.

    ``variable`` is the grid variable ``S`` depends on; ``factors`` replaces
    it for scenarios whose PPT test splits into independent single-pair
    tests, each with its own variable. ``derived`` holds our own closed form
    where it disagrees with the reference one, and ``p_derived`` the
    probability that follows from it. ``label`` is ``"sep"`` for ``n <= 6``
    and ``"ppt"`` otherwise.
    """

    id: str
    c: str
    variable: str | None = None
    pieces: tuple[Piece, ...] = ()
    v_tot: str | None = None
    v_sep: str | None = None
    p: str | None = None
    dual: str | None = None
    group: str = ""
    notes: tuple[str, ...] = ()
    flags: frozenset[str] = frozenset()
    factors: tuple[tuple[str, str], ...] = ()
    derived: tuple[Piece, ...] = ()
    p_derived: str | None = None
    s_at_1: str | None = None

    @cached_property
    def spec(self) -> ScenarioSpec:
        return ScenarioSpec.from_id(self.id)

    @property
    def label(self) -> str:
        return "sep" if self.spec.split.n <= 6 else "ppt"

    @property
    def has_function(self) -> bool:
        return bool(self.pieces)

    def S(self, g):
        """Reference separability function at grid-variable values ``g``."""
        if not self.pieces:
            raise ValueError(f"{self.id} has no closed-form separability function")
        return _eval_pieces(self.pieces, g)

    def S_derived(self, g):
        return _eval_pieces(self.derived or self.pieces, g)

    def value(self, name: str) -> float | None:
        expr = getattr(self, name)
        return None if expr is None else float(evaluate(expr))

    @property
    def c_value(self) -> float:
        return float(evaluate(self.c))

    def jacobian(self) -> JacobianSpec:
        if self.variable is None:
            raise ValueError(f"{self.id} has no single grid variable")
        return scenario_jacobian(self.spec, self.variable)

    def dirichlet_total(self) -> float:
        """``prod Gamma(alpha_i) / Gamma(sum alpha)``: the diagonal-simplex mass."""
        a = dirichlet_alphas(self.spec)
        return math.exp(sum(math.lgamma(x) for x in a) - math.lgamma(a.sum()))

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "label": self.label,
            "variable": self.variable,
            "c": self.c,
            "V_tot": self.v_tot,
            "V_sep": self.v_sep,
            "P": self.p,
            "S": [{"domain": p.domain, "formula": p.formula} for p in self.pieces],
            "dual": self.dual,
            "group": self.group,
            "notes": list(self.notes),
            "flags": sorted(self.flags),
        }
        if self.factors:
            d["factors"] = [{"id": i, "variable": v} for i, v in self.factors]
        if self.derived:
            d["S_derived"] = [{"domain": p.domain, "formula": p.formula} for p in self.derived]
        if self.p_derived is not None:
            d["P_derived"] = self.p_derived
        if self.s_at_1 is not None:
            d["S_at_1"] = self.s_at_1
        return d


@dataclass(frozen=True)
class ConjectureRecord:
    name: str
    system: str
    field: str
    p: str
    scale: str
    ansatz: str
    v_sep: str | None = None
    alternates: tuple[tuple[str, str, str], ...] = ()   # (scale, P, remark)
    status: str = "conjecture"

    @property
    def p_value(self) -> float:
        return float(evaluate(self.p))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "system": self.system,
            "field": self.field,
            "P": self.p,
            "scale": self.scale,
            "ansatz": self.ansatz,
            "V_sep": self.v_sep,
            "alternates": [dict(zip(("scale", "P", "remark"), a)) for a in self.alternates],
            "status": self.status,
        }


# --- piece shorthands ----------------------------------------------------------------

def _rising(a: str, low: str) -> tuple[Piece, ...]:
    """``low`` on ``g <= 1``, constant ``a`` above."""
    return (Piece("<=1", low), Piece(">1", a))


def _falling(a: str, high: str) -> tuple[Piece, ...]:
    """Constant ``a`` on ``g <= 1``, ``high`` above."""
    return (Piece("<=1", a), Piece(">1", high))


def _two(low: str, high: str) -> tuple[Piece, ...]:
    return (Piece("<=1", low), Piece(">1", high))


def _rec(id, c, variable=None, pieces=(), v_tot=None, v_sep=None, p=None, dual=None,
         group="", notes=(), flags=(), **kw) -> ScenarioRecord:
    return ScenarioRecord(id, c, variable, tuple(pieces), v_tot, v_sep, p, dual, group,
                          tuple(notes), frozenset(flags), **kw)


def _dual_pair(a_id, b_id, c, variable, a_pieces, b_pieces, **common):
    return [
        _rec(a_id, c, variable, a_pieces, dual=b_id, **common),
        _rec(b_id, c, variable, b_pieces, dual=a_id, **common),
    ]


def _build() -> list[ScenarioRecord]:
    R: list[ScenarioRecord] = []

    # Two qubits, one active pair.
    g = "two qubits, one active pair"
    R += _dual_pair("2x2:real:[(2,3)]", "2x2:real:[(1,4)]", "2", "nu",
                    _rising("2", "2*sqrt(g)"), _falling("2", "2/sqrt(g)"),
                    v_tot="pi/48", v_sep="pi**2/256", p="3*pi/16", group=g)
    R += _dual_pair("2x2:complex:[(2,3)]", "2x2:complex:[(1,4)]", "pi", "nu",
                    _rising("pi", "pi*g"), _falling("pi", "pi/g"),
                    v_tot="pi/120", v_sep="pi/360", p="1/3", group=g)
    R += _dual_pair("2x2:quaternion:[(2,3)]", "2x2:quaternion:[(1,4)]", "pi**2/2", "nu",
                    _rising("pi**2/2", "pi**2*g**2/2"), _falling("pi**2/2", "pi**2/(2*g**2)"),
                    v_tot="pi**2/2520", v_sep="pi**2/25200", p="1/10", group=g)

    # Two qubits, two real pairs.
    g = "two qubits, two real pairs"
    rising = ["(1,2),(2,3)", "(1,3),(2,3)", "(2,3),(2,4)", "(2,3),(3,4)"]
    falling = ["(1,2),(1,4)", "(1,3),(1,4)", "(1,4),(2,4)", "(1,4),(3,4)"]
    for a, b in zip(rising, falling):
        R += _dual_pair(f"2x2:real:[{a}]", f"2x2:real:[{b}]", "pi", "nu",
                        _rising("pi", "pi*sqrt(g)"), _falling("pi", "pi/sqrt(g)"),
                        v_tot="pi**2/480", v_sep="pi**2/768", p="5/8", group=g)
    R.append(_rec("2x2:real:[(1,4),(2,3)]", "4", "nu", _two("4*sqrt(g)", "4/sqrt(g)"),
                  v_tot="pi**2/480", v_sep="1/90", p="16/(3*pi**2)", group=g,
                  notes=("the tabulated scenario jacobian carries an overall sign error; "
                         "its magnitude is sqrt(nu)(3 - 3 nu^2 + (nu^2 + 4 nu + 1) log nu)/(30 (1-nu)^5)",),
                  flags=("jacobian-sign",)))
    for pairs, c in [("(1,2),(1,3)", "pi"), ("(1,2),(2,4)", "pi"), ("(1,3),(3,4)", "pi"),
                     ("(2,4),(3,4)", "pi"), ("(1,2),(3,4)", "4"), ("(1,3),(2,4)", "4")]:
        R.append(_rec(f"2x2:real:[{pairs}]", c, "nu", (Piece("all", c),), v_tot="pi**2/480",
                      v_sep="pi**2/480", p="1", group=g, flags=("trivial",)))

    # Two qubits, one complex and one real pair.
    g = "two qubits, one complex and one real pair"
    for a, b in [("(1,2)c,(1,4)r", "(1,2)c,(2,3)r"), ("(1,3)c,(1,4)r", "(1,3)c,(2,3)r")]:
        R += _dual_pair(f"2x2:mixed:[{a}]", f"2x2:mixed:[{b}]", "4*pi/3", "nu",
                        _falling("4*pi/3", "4*pi/(3*sqrt(g))"), _rising("4*pi/3", "4*pi*sqrt(g)/3"),
                        v_tot="pi**2/1440", v_sep="7*pi**3/49152", p="105*pi/512", group=g)
    R.append(_rec("2x2:mixed:[(1,4)c,(2,3)r]", "2*pi", "nu", _two("2*pi*sqrt(g)", "2*pi/g"),
                  v_tot="pi**2/1440", v_sep="3*pi**3/32768", p="135*pi/1024", group=g))
    for a, b in [("(1,4)c,(2,4)r", "(2,3)c,(2,4)r"), ("(1,4)c,(3,4)r", "(2,3)c,(3,4)r")]:
        R += _dual_pair(f"2x2:mixed:[{a}]", f"2x2:mixed:[{b}]", "4*pi/3", "nu",
                        _falling("4*pi/3", "4*pi/(3*g)"), _rising("4*pi/3", "4*pi*g/3"),
                        v_tot="pi**2/1440", v_sep="pi**2/3840", p="3/8", group=g)

    # Two qubits, two complex pairs.
    g = "two qubits, two complex pairs"
    falling = ["(1,2),(1,4)", "(1,3),(1,4)", "(1,4),(2,4)", "(1,4),(3,4)"]
    rising = ["(1,2),(2,3)", "(1,3),(2,3)", "(2,3),(2,4)", "(2,3),(3,4)"]
    for a, b in zip(falling, rising):
        R += _dual_pair(f"2x2:complex:[{a}]", f"2x2:complex:[{b}]", "pi**2/2", "nu",
                        _falling("pi**2/2", "pi**2/(2*g)"), _rising("pi**2/2", "pi**2*g/2"),
                        v_tot="pi**2/5040", v_sep="pi**2/12600", p="2/5", group=g)
    R.append(_rec("2x2:complex:[(1,4),(2,3)]", "pi**2", "nu", _two("pi**2*g", "pi**2/g"),
                  v_tot="pi**2/5040", v_sep="pi**2/12600", p="2/5", group=g))

    # Two qubits, one quaternionic pair beside a real one: c values only.
    g = "two qubits, one quaternionic and one real pair"
    R.append(_rec("2x2:mixed:[(1,2)q,(1,4)r]", "8*pi**2/15", group=g, flags=("c-only",)))
    R.append(_rec("2x2:mixed:[(1,2)r,(1,4)q]", "32", group=g, flags=("c-only", "reference-inconsistent"),
                  notes=("the feasible set is the unit 5-ball, of measure 8 pi^2/15, "
                         "exactly as for the partner scenario; the reference value 32 cannot hold",)))

    # Two qubits, three pairs.
    g = "two qubits, three real pairs"
    vsep3 = "2*(pi**3/5760 - 29*pi**4/786432)"
    for a, b in [("(1,2),(2,3),(3,4)", "(1,2),(1,4),(3,4)"), ("(1,3),(2,3),(2,4)", "(1,3),(1,4),(2,4)")]:
        R += _dual_pair(f"2x2:real:[{a}]", f"2x2:real:[{b}]", "pi**2/2", "nu",
                        _rising("pi**2/2", "pi**2*sqrt(g)/2"), _falling("pi**2/2", "pi**2/(2*sqrt(g))"),
                        v_tot="pi**3/5760", v_sep=vsep3, p="2 - 435*pi/1024", group=g)
    for pairs in ["(1,2),(1,3),(2,4)", "(1,2),(1,3),(3,4)", "(1,2),(2,4),(3,4)", "(1,3),(2,4),(3,4)"]:
        R.append(_rec(f"2x2:real:[{pairs}]", "pi**2/2", "nu", (Piece("all", "pi**2/2"),),
                      v_tot="pi**3/5760", v_sep="pi**3/5760", p="1", group=g, flags=("trivial",)))
    for pairs in ["(1,2),(1,3),(1,4)", "(1,2),(2,3),(2,4)", "(1,3),(2,3),(3,4)", "(1,4),(2,4),(3,4)"]:
        R.append(_rec(f"2x2:real:[{pairs}]", "4*pi/3", group=g, flags=("c-only",),
                      s_at_1="(12 + 16*pi + 3*pi**2)/24"))

    g = "two qubits, one complex and two real pairs"
    R += _dual_pair("2x2:mixed:[(1,2)c,(2,3)r,(3,4)r]", "2x2:mixed:[(1,2)c,(1,4)r,(3,4)r]",
                    "2*pi**2/3", "nu",
                    _rising("2*pi**2/3", "2*pi**2*sqrt(g)/3"), _falling("2*pi**2/3", "2*pi**2/(3*sqrt(g))"),
                    v_tot="pi**3/20160", v_sep="11*pi**3/322560", p="11/16", group=g)
    for pairs in ["(1,2)c,(1,3)r,(1,4)r", "(1,2)c,(2,3)r,(2,4)r", "(1,3)c,(2,3)r,(3,4)r",
                  "(1,4)c,(2,4)r,(3,4)r"]:
        R.append(_rec(f"2x2:mixed:[{pairs}]", "pi**2/2", group=g, flags=("c-only",),
                      s_at_1="56/27 + pi**2/4"))
    for pairs in ["(1,2)c,(1,3)r,(2,4)r", "(1,2)c,(1,4)r,(2,3)r", "(1,3)c,(1,4)r,(2,3)r"]:
        R.append(_rec(f"2x2:mixed:[{pairs}]", "16*pi/9", group=g, flags=("c-only",), s_at_1="16*pi/9"))
    for pairs in ["(1,2)c,(1,3)r,(2,3)r", "(1,2)c,(1,4)r,(2,4)r", "(1,3)c,(1,4)r,(3,4)r",
                  "(2,3)c,(2,4)r,(3,4)r"]:
        R.append(_rec(f"2x2:mixed:[{pairs}]", "16*pi/9", group=g, flags=("c-only",),
                      s_at_1="56/27 + pi**2/4"))
    R.append(_rec("2x2:mixed:[(1,2)c,(1,3)c,(1,4)r]", "8*pi**2/15",
                  group="two qubits, two complex and one real pair", flags=("c-only",)))
    g = "two qubits, three complex pairs"
    for pairs in ["(1,4),(2,3),(2,4)", "(1,2),(1,4),(3,4)", "(1,3),(1,4),(2,4)", "(1,4),(2,3),(3,4)"]:
        R.append(_rec(f"2x2:complex:[{pairs}]", "pi**3/4", group=g, flags=("c-only",), s_at_1="pi**3/4"))
    for pairs in ["(1,2),(1,3),(1,4)", "(1,3),(2,3),(3,4)", "(1,4),(2,4),(3,4)"]:
        R.append(_rec(f"2x2:complex:[{pairs}]", "pi**3/6", group=g, flags=("c-only",)))

    # Two qubits, four or more real pairs: c values only.
    R.append(_rec("2x2:real:[(1,2),(1,3),(2,4),(3,4)]", "2*pi**2/3", "nu", (Piece("all", "2*pi**2/3"),),
                  p="1", group="two qubits, four real pairs", flags=("trivial",)))
    R.append(_rec("2x2:real:[(1,2),(1,3),(1,4),(2,3)]", "2*pi**2/3",
                  group="two qubits, four real pairs", flags=("c-only",)))
    R.append(_rec("2x2:real:[(1,2),(1,3),(1,4),(2,3),(2,4)]", "8*pi**2/9",
                  group="two qubits, five real pairs", flags=("c-only",)))
    R.append(_rec("2x2:real:[(1,2),(1,3),(1,4),(2,3),(2,4),(3,4)]", "32*pi**2/27",
                  group="two qubits, all six real pairs", flags=("c-only",),
                  notes=("the unit-box measure; the conventional total volume uses 16 times this constant",)))

    # Qubit-qutrit, one pair.
    g = "qubit-qutrit, one real pair"
    common = dict(v_tot="pi/1440", v_sep="pi**2/7680", p="3*pi/16", group=g)
    R += _dual_pair("2x3:real:[(1,5)]", "2x3:real:[(2,4)]", "2", "nu1",
                    _falling("2", "2/sqrt(g)"), _rising("2", "2*sqrt(g)"), **common)
    R += _dual_pair("2x3:real:[(1,6)]", "2x3:real:[(3,4)]", "2", "eta",
                    _falling("2", "2/sqrt(g)"), _rising("2", "2*sqrt(g)"), **common)
    R += _dual_pair("2x3:real:[(2,6)]", "2x3:real:[(3,5)]", "2", "nu2",
                    _falling("2", "2/sqrt(g)"), _rising("2", "2*sqrt(g)"), **common)
    g = "qubit-qutrit, one complex pair"
    common = dict(v_tot="pi/5040", v_sep="pi/15120", p="1/3", group=g)
    for a, b, var in [("(1,5)", "(2,4)", "nu1"), ("(1,6)", "(3,4)", "eta"), ("(2,6)", "(3,5)", "nu2")]:
        R += _dual_pair(f"2x3:complex:[{a}]", f"2x3:complex:[{b}]", "pi", var,
                        _falling("pi", "pi/g"), _rising("pi", "pi*g"), **common)

    # Qubit-qutrit, two real pairs.
    g = "qubit-qutrit, two real pairs"
    vt_note = ("reference V_tot pi^2/20610 corrected to pi^2/20160, the value of c times the diagonal-simplex mass",)
    for a, b in [("(1,2),(1,5)", "(1,2),(2,4)"), ("(1,4),(1,5)", "(1,4),(2,4)")]:
        R += _dual_pair(f"2x3:real:[{a}]", f"2x3:real:[{b}]", "pi", "nu1",
                        _falling("pi", "pi/sqrt(g)"), _rising("pi", "pi*sqrt(g)"),
                        v_tot="pi**2/20160", v_sep="pi**2/32256", p="5/8", group=g,
                        notes=vt_note, flags=("reference-typo",))
    for pairs in ["(1,3),(1,6)", "(1,4),(1,6)"]:
        R.append(_rec(f"2x3:real:[{pairs}]", "pi", "eta", (Piece("<1", "pi"), Piece(">=1", "pi/sqrt(g)")),
                      v_tot="pi**2/20160", v_sep="pi**2/64512", p="5/16", group=g, p_derived="5/8",
                      notes=vt_note + ("the reference function, integrated against the eta jacobian, gives "
                                       "P = 5/8, and whole-scenario sampling agrees; the reference P and V_sep "
                                       "are half of that",),
                      flags=("reference-typo", "reference-inconsistent")))
    R.append(_rec("2x3:real:[(1,4),(2,6)]", "4", "nu2", _falling("4", "4/sqrt(g)"),
                  v_tot="pi**2/20160", v_sep="pi**2/215040", p="3*pi/32", group=g, p_derived="3*pi/16",
                  notes=vt_note + ("the pair (1,4) is left in place by the partial transpose, so P equals "
                                   "the single-pair value 3 pi/16; the reference V_sep/V_tot is 3/32 and "
                                   "the reference P is 3 pi/32, consistent with neither",),
                  flags=("reference-typo", "reference-inconsistent")))
    R.append(_rec("2x3:real:[(1,5),(2,4)]", "4", "nu1", _two("4*sqrt(g)", "4/sqrt(g)"),
                  v_tot="pi**2/20160", v_sep="1/3780", p="16/(3*pi**2)", group=g,
                  notes=vt_note, flags=("reference-typo",)))
    R.append(_rec("2x3:real:[(1,2),(2,6)]", "pi", "nu2", (Piece("<=1", "pi"), Piece(">1", "@arc_cos_form")),
                  v_tot="pi**2/20160", group=g))
    R.append(_rec("2x3:real:[(1,3),(1,5)]", "pi", "nu1", (Piece("<=1", "pi"), Piece(">1", "@arc_cos_form")),
                  v_tot="pi**2/20160", group=g))
    R.append(_rec("2x3:real:[(1,2),(3,4)]", "4", "eta",
                  (Piece("<1", "pi*sqrt(g)"), Piece(">=1", "@arg_log_form")), v_tot="pi**2/20160", group=g,
                  notes=("the complex-logarithm piece is evaluated in its real arcsine form",)))
    R.append(_rec("2x3:real:[(1,2),(3,5)]", "4", "nu2",
                  (Piece("<1", "pi*sqrt(g)"), Piece(">=1", "@arg_log_form")), v_tot="pi**2/20160", group=g))

    # Qubit-qutrit, one complex and one real pair.
    g = "qubit-qutrit, one complex and one real pair"
    for pairs in ["(1,2)c,(2,4)r", "(1,4)c,(2,4)r"]:
        R.append(_rec(f"2x3:mixed:[{pairs}]", "4*pi/3", "nu1",
                      (Piece(">=1", "4*pi/3"), Piece("<1", "4*pi*sqrt(g)/3")),
                      v_tot="pi**2/80640", v_sep="pi**3/393216", p="105*pi/512", group=g))
    R.append(_rec("2x3:mixed:[(1,3)c,(2,4)r]", "2*pi", "nu1",
                  _two("4*pi*sqrt(g)/3", "2*pi - 2*pi/(3*g)"), group=g))
    for pairs in ["(1,3)c,(3,4)r", "(1,4)c,(3,4)r"]:
        R.append(_rec(f"2x3:mixed:[{pairs}]", "4*pi/3", "eta",
                      (Piece(">=1", "4*pi/3"), Piece("<1", "4*pi*sqrt(g)/3")),
                      v_tot="pi**2/80640", group=g))
    R.append(_rec("2x3:mixed:[(2,3)c,(3,4)r]", "4*pi/3", "eta",
                  (Piece(">=1", "4*pi/3"), Piece("<1", "2*pi*sqrt(g)*(3 - g)/3")),
                  v_tot="pi**2/80640", group=g))
    R.append(_rec("2x3:mixed:[(1,2)c,(3,4)r]", "2*pi", "eta",
                  (Piece("==1", "4*pi/3"), Piece("<1", "4*pi*sqrt(g)/3"),
                   Piece(">1", "pi*(sqrt(g) + 2) - 2*pi/(3*g)")),
                  group=g, derived=_two("4*pi*sqrt(g)/3", "2*pi - 2*pi/(3*g)"), p_derived="3*pi/16",
                  flags=("reference-inconsistent",),
                  notes=("the reference piece above 1 grows like sqrt(g) and exceeds c = 2 pi; "
                         "the transposed pair (1,6) carries scale 1/sqrt(g), giving 2 pi - 2 pi/(3 g)",)))
    R.append(_rec("2x3:mixed:[(2,3)c,(2,4)r]", "4*pi/3", "nu1",
                  (Piece(">=1", "4*pi/3"), Piece("<1", "2*pi*(3 - g)*sqrt(g)/3")),
                  v_tot="pi**2/80640", group=g))

    # Qubit-qutrit, two complex pairs.
    g = "qubit-qutrit, two complex pairs"
    for pairs in ["(1,2),(2,4)", "(1,4),(2,4)"]:
        R.append(_rec(f"2x3:complex:[{pairs}]", "pi**2/2", "nu1", _rising("pi**2/2", "pi**2*g/2"),
                      v_tot="pi**2/362880", v_sep="pi**2/907200", p="2/5", group=g))
    R.append(_rec("2x3:complex:[(1,4),(3,4)]", "pi**2/2", "eta",
                  (Piece(">=1", "pi**2/2"), Piece("<1", "pi**2*g/2")),
                  v_tot="pi**2/362880", v_sep="pi**2/907200", p="2/5", group=g))
    vt_c = "pi**2/362880"
    vt_note_c = ("the reference V_sep is set equal to V_tot although P = 1/3; stored as V_tot/3",)
    R.append(_rec("2x3:complex:[(1,2),(3,4)]", "pi**2", "eta",
                  (Piece(">1", "(2*pi**2*g - pi**2)/(2*g)"), Piece("<=1", "pi**2*g/2")),
                  v_tot=vt_c, v_sep=f"({vt_c})/3", p="1/3", group=g, notes=vt_note_c,
                  flags=("reference-typo",)))
    R.append(_rec("2x3:complex:[(1,3),(2,4)]", "pi**2", "nu1",
                  _two("pi**2*g/2", "pi**2 - pi**2/(2*g)"),
                  v_tot=vt_c, v_sep=f"({vt_c})/3", p="1/3", group=g, notes=vt_note_c,
                  flags=("reference-typo",)))
    R.append(_rec("2x3:complex:[(2,3),(3,4)]", "pi**2/2", "eta",
                  (Piece(">=1", "pi**2/2"), Piece("<1", "pi**2*g*(2 - g)/2")),
                  v_tot="pi**2/362880", group=g))

    # Qubit-qutrit, three real pairs.
    g = "qubit-qutrit, three real pairs"
    for pairs in ["(1,2),(1,3),(3,4)", "(1,2),(1,4),(3,4)"]:
        R.append(_rec(f"2x3:real:[{pairs}]", "pi**2/2", "eta",
                      (Piece("==1", "4*pi/3"), Piece("<1", "4*pi*sqrt(g)/3"), Piece(">1", "@arc_sec_form")),
                      group=g))
    R.append(_rec("2x3:real:[(1,3),(1,4),(2,4)]", "pi**2/2", "nu1",
                  (Piece("==1", "4*pi/3"), Piece("<1", "4*pi*sqrt(g)/3"), Piece(">1", "@arc_sin_form")),
                  group=g))

    # Qutrit-qutrit.
    g = "qutrit-qutrit, one complex pair"
    R += _dual_pair("3x3:complex:[(1,5)]", "3x3:complex:[(2,4)]", "pi", "nu1",
                    _falling("pi", "pi/g"), _rising("pi", "pi*g"),
                    v_tot="pi/3628800", v_sep="pi/10886400", p="1/3", group=g)
    R.append(_rec("3x3:complex:[(1,6)]", "pi", "nu1*nu2", _falling("pi", "pi/g"),
                  v_tot="pi/3628800", v_sep="pi/10886400", p="1/3", group=g))
    R.append(_rec("3x3:complex:[(6,8)]", "pi", "nu4", (Piece(">=1", "pi"), Piece("<1", "pi*g")),
                  v_tot="pi/3628800", v_sep="pi/21772800", p="1/6", group=g, p_derived="1/3",
                  flags=("reference-inconsistent",),
                  notes=("the partial transpose moves (6,8) to (5,9), so PPT reads |z|^2 <= nu4; "
                         "the four diagonal entries involved enter with the same weights as for (2,4), "
                         "which forces P = 1/3",
                         "the count statement 'thirteen had 1/3, while four had 1/3' is inconsistent; "
                         "group sizes 13 and 4 are kept unverified")))
    g = "qutrit-qutrit, two complex pairs"
    R.append(_rec("3x3:complex:[(1,4),(3,5)]", "pi**2", "nu2", (Piece(">=1", "pi**2"), Piece("<1", "pi**2*g")),
                  v_tot="pi**2/479001600", v_sep="pi**2/1437004800", p="1/3", group=g))
    R.append(_rec("3x3:complex:[(2,9),(6,9)]", "pi**2/2", "nu2*nu4",
                  _two("pi**2/2", "pi**2*(2*g - 1)/(2*g**2)"),
                  v_tot="pi**2/479001600", v_sep="pi**2/2052864000", p="7/30", group=g, p_derived="1/3",
                  flags=("reference-inconsistent",),
                  notes=("the reference function integrates to P = 1/3 exactly against the nu2 nu4 "
                         "jacobian, and whole-scenario sampling agrees; 7/30 matches only the reference V_sep",)))

    # Eight levels as 4 x 2.
    g = "4x2 split, one complex pair"
    R += _dual_pair("4x2:complex:[(1,6)]", "4x2:complex:[(2,5)]", "pi", "nu1",
                    _falling("pi", "pi/g"), _rising("pi", "pi*g"),
                    v_tot="pi/362880", v_sep="pi/1088640", p="1/3", group=g)
    g = "4x2 split, two complex pairs"
    R.append(_rec("4x2:complex:[(3,5),(6,8)]", "pi**2", "nu1*nu2",
                  (Piece(">=1", "pi**2"), Piece("<1", "pi**2*g")),
                  v_tot="pi**2/39916800", v_sep="pi**2/119750400", p="1/3", group=g))
    R.append(_rec("4x2:complex:[(2,5),(4,7)]", "pi**2", None, (),
                  v_tot="pi**2/39916800", v_sep="pi**2/359251200", p="1/9", group=g,
                  factors=(("4x2:complex:[(2,5)]", "nu1"), ("4x2:complex:[(4,7)]", "nu3")),
                  notes=("S = pi^2 min(1, nu1) min(1, nu3); the two PPT conditions involve disjoint "
                         "diagonal entries, so the probability is the product of the factors' (1/3 each)",)))
    R.append(_rec("4x2:complex:[(1,3),(4,7)]", "pi**2", "nu3",
                  (Piece("==1", "pi**2/2"), Piece("<1", "pi**2*g/2"), Piece(">1", "@cos_minus_sin_form")),
                  v_tot="pi**2/39916800", group=g,
                  notes=("stated as a function of nu1 with a body in nu3; stored under nu3",
                         "acos(sqrt(1 - 1/nu)) = asin(1/sqrt(nu)), so the piece above 1 is pi^2 - pi^2/(2 nu)")))

    # Eight levels as three qubits.
    g = "three qubits, one complex pair"
    R.append(_rec("2x2x2:complex:[(1,4)]", "pi", "nu1", _falling("pi", "pi/g"),
                  v_tot="pi/362880", v_sep="pi/1088640", p="1/3", group=g))
    g = "three qubits, two complex pairs"
    R.append(_rec("2x2x2:complex:[(1,8),(5,7)]", "pi**2", "nu1*nu3/nu2",
                  (Piece("==1", "pi**2/2"), Piece(">1", "pi**2/(4*g)"), Piece("<1", "pi**2 - pi**2*g/2")),
                  v_tot="pi**2/39916800", v_sep="17*pi**2/239500800", p="17/60", group=g,
                  derived=(Piece("<=1", "pi**2*(1 - g/2)"), Piece(">1", "pi**2/(2*g)")), p_derived="1/3",
                  flags=("reference-inconsistent",),
                  notes=("the reference function jumps at g = 1 (pi^2/2 from below, pi^2/4 from above)",
                         "the reference V_sep/V_tot is 17/6, not 17/60",
                         "PPT here reads |z18|^2 + |z57|^2 <= 1 after transposition rescaling, giving "
                         "pi^2 (1 - g/2) below 1 and pi^2/(2 g) above, hence P = 1/3")))
    R.append(_rec("2x2x2:complex:[(1,4),(7,8)]", "pi**2", "nu1", _falling("pi**2", "pi**2/g"),
                  v_tot="pi**2/39916800", v_sep="pi**2/119750400", p="1/3", group=g,
                  notes=("reference V_PPT 17 pi^2/119750400 corrected to pi^2/119750400, "
                         "the value consistent with P = 1/3",),
                  flags=("reference-typo",)))
    R.append(_rec("2x2x2:complex:[(3,4),(3,8)]", "pi**2/2", "nu3/nu2",
                  _two("pi**2/2", "pi**2*(2*g - 1)/(2*g**2)"), group=g,
                  derived=_falling("pi**2/2", "pi**2/(2*g)"), p_derived="2/5",
                  flags=("reference-inconsistent",),
                  notes=("written in (nu2, nu3); depends on g = nu3/nu2 only",
                         "the reference function gives P = 1/2; eliminating the transposed pair gives "
                         "pi^2/(2 g) above 1 and P = 2/5, which whole-scenario sampling confirms")))
    return R


def _build_conjectures() -> list[ConjectureRecord]:
    return [
        ConjectureRecord(
            "real two-qubit", "2x2", "real", "8/17", "20*pi**4/17", "I_nu(1/2,2)",
            v_sep="pi**4/128520",
            alternates=(("7*pi**4/6", "7/15", "inferior fit"), ("32*pi**4/27", "64/135", "inferior fit"))),
        ConjectureRecord(
            "complex two-qubit", "2x2", "complex", "8/33", "256*pi**6/639", "I_nu(1/2,2)**2",
            v_sep="2*pi**6/7023641625",
            alternates=(("2*pi**6/5", "213/880", "simpler constant, inferior fit"),)),
        ConjectureRecord(
            "complex qubit-qutrit", "2x3", "complex", "32/1199",
            "537472*sqrt(2/3)*pi**15/10063956375", "eta",
            v_sep="pi**15/(56980588975590080071885989375000*sqrt(6))"),
        ConjectureRecord(
            "real qubit-qutrit", "2x3", "real", "32/213",
            "78848*pi**8/(139515*sqrt(3))", "sqrt(eta)"),
    ]


_RECORDS = {r.id: r for r in _build()}
_CONJECTURES = tuple(_build_conjectures())


def records() -> list[ScenarioRecord]:
    return list(_RECORDS.values())


def lookup(id: str) -> ScenarioRecord:
    """Record for a scenario id; pair order and spacing need not be canonical."""
    try:
        key = ScenarioSpec.from_id(id).id
    except ValueError as exc:
        raise KeyError(f"malformed scenario id {id!r}") from exc
    if key not in _RECORDS:
        raise KeyError(f"no catalogued scenario {id!r}")
    return _RECORDS[key]


def conjectures() -> list[ConjectureRecord]:
    return list(_CONJECTURES)


def export_json(path=None, indent: int = 2) -> str:
    doc = {
        "scenarios": [r.to_dict() for r in _RECORDS.values()],
        "conjectures": [c.to_dict() for c in _CONJECTURES],
    }
    text = json.dumps(doc, indent=indent)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
