"""Density matrices in Bloore coordinates.

A state is written as ``rho_ij = z_ij * sqrt(rho_ii * rho_jj)``: the diagonal
lives on the probability simplex and each active off-diagonal pair carries a
scale factor ``z_ij`` of norm at most one. Indices are 1-based throughout, so
scenario labels such as ``(2, 3)`` read exactly as written.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "NumberField",
    "SystemSplit",
    "DensityMatrix",
    "BlooreParams",
    "ScenarioSpec",
    "RatioVars",
    "GridVariable",
    "assemble_density",
    "ratio_variables",
    "canonical_diag",
    "solve_rho33_for_nu",
    "quat_conj",
]

Pair = tuple[int, int]


class NumberField(enum.Enum):
    """Real, complex or quaternionic entries; the value is the real dimension."""

    REAL = 1
    COMPLEX = 2
    QUATERNION = 4

    @property
    def d_f(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def suffix(self) -> str:
        return self.name[0].lower()

    @classmethod
    def parse(cls, text: str) -> "NumberField":
        key = text.strip().lower()
        for member in cls:
            if key in (member.label, member.suffix):
                return member
        raise ValueError(f"unknown number field {text!r}")


class SystemSplit(enum.Enum):
    """Supported bipartitions, keyed by label.

    Partial transposition transposes every ``block x block`` sub-block of the
    ``n x n`` matrix in place. Ratio variables are listed as (numerator pair,
    denominator pair) of diagonal indices.
    """

    TWO_QUBIT = ("2x2", 4, 2, ((1, 4, 2, 3),))
    QUBIT_QUTRIT = ("2x3", 6, 3, ((1, 5, 2, 4), (2, 6, 3, 5)))
    QUTRIT_QUTRIT = (
        "3x3", 9, 3,
        ((1, 5, 2, 4), (2, 6, 3, 5), (4, 8, 5, 7), (5, 9, 6, 8)),
    )
    FOUR_TWO = ("4x2", 8, 4, ((1, 6, 2, 5), (2, 7, 3, 6), (3, 8, 4, 7)))
    TWO_TWO_TWO = ("2x2x2", 8, 2, ((1, 4, 2, 3), (4, 5, 3, 6), (5, 8, 6, 7)))

    def __init__(self, label, n, block, ratios):
        self.label = label
        self.n = n
        self.block = block
        self.ratio_defs = ratios

    @classmethod
    def parse(cls, text: str) -> "SystemSplit":
        for member in cls:
            if member.label == text.strip().lower():
                return member
        raise ValueError(f"unknown system {text!r}")

    @property
    def ratio_names(self) -> tuple[str, ...]:
        if len(self.ratio_defs) == 1:
            return ("nu",)
        return tuple(f"nu{k + 1}" for k in range(len(self.ratio_defs)))

    def pt_position(self, i: int, j: int) -> Pair:
        """Where entry ``(i, j)`` lands under the block partial transpose."""
        b = self.block
        a_i, x_i = divmod(i - 1, b)
        a_j, x_j = divmod(j - 1, b)
        return a_i * b + x_j + 1, a_j * b + x_i + 1

    @cached_property
    def ratio_matrix(self) -> np.ndarray:
        """Rows give the exponent of each diagonal entry in one ratio."""
        m = np.zeros((len(self.ratio_defs), self.n))
        for r, (p, q, s, t) in enumerate(self.ratio_defs):
            m[r, p - 1] += 1
            m[r, q - 1] += 1
            m[r, s - 1] -= 1
            m[r, t - 1] -= 1
        return m


def quat_conj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def _widest(fields: Iterable[NumberField]) -> NumberField:
    return max(fields, key=lambda f: f.d_f, default=NumberField.REAL)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Self-adjoint matrix over a number field.

    ``data`` has shape ``(n, n)`` (float or complex) or ``(n, n, 4)`` for
    quaternions, whose last axis holds the 1, i, j, k components.
    """

    data: np.ndarray
    field: NumberField

    def __post_init__(self) -> None:
        arr = np.array(self.data, copy=True)
        if self.field is NumberField.QUATERNION:
            if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 4:
                raise ValueError("quaternionic data must have shape (n, n, 4)")
            arr = arr.astype(float)
        else:
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError("matrix data must be square")
            arr = arr.astype(complex if self.field is NumberField.COMPLEX else float)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def diag(self) -> np.ndarray:
        d = np.diagonal(self.data, axis1=0, axis2=1)
        return (d[0] if self.field is NumberField.QUATERNION else d.real).copy()

    def trace(self) -> float:
        return float(self.diag.sum())

    def is_self_adjoint(self, atol: float = 1e-12) -> bool:
        if self.field is NumberField.QUATERNION:
            swapped = quat_conj(np.transpose(self.data, (1, 0, 2)))
            return bool(np.allclose(self.data, swapped, atol=atol, rtol=0))
        return bool(np.allclose(self.data, self.data.conj().T, atol=atol, rtol=0))

    def as_complex(self) -> np.ndarray:
        """Complex matrix for real/complex data, symplectic embedding otherwise."""
        if self.field is not NumberField.QUATERNION:
            return self.data.astype(complex)
        from .positivity import embed_quaternionic_array

        return embed_quaternionic_array(self.data)


@dataclass(frozen=True)
class ScenarioSpec:
    """A split together with its active off-diagonal pairs and their fields."""

    split: SystemSplit
    active: tuple[tuple[Pair, NumberField], ...]

    def __post_init__(self) -> None:
        seen = set()
        clean = []
        for (i, j), f in self.active:
            i, j = int(i), int(j)
            if not 1 <= i < j <= self.split.n:
                raise ValueError(f"pair {(i, j)} is not upper-triangular within n={self.split.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate pair {(i, j)}")
            seen.add((i, j))
            clean.append(((i, j), NumberField(f)))
        object.__setattr__(self, "active", tuple(sorted(clean)))

    @classmethod
    def uniform(cls, split: SystemSplit, pairs: Iterable[Pair], fld: NumberField) -> "ScenarioSpec":
        return cls(split, tuple((tuple(p), fld) for p in pairs))

    @classmethod
    def full(cls, split: SystemSplit, fld: NumberField) -> "ScenarioSpec":
        n = split.n
        return cls.uniform(split, [(i, j) for i in range(1, n) for j in range(i + 1, n + 1)], fld)

    @property
    def pairs(self) -> tuple[Pair, ...]:
        return tuple(p for p, _ in self.active)

    @property
    def fields(self) -> tuple[NumberField, ...]:
        return tuple(f for _, f in self.active)

    @property
    def field(self) -> NumberField:
        return _widest(self.fields)

    @property
    def is_mixed(self) -> bool:
        return len(set(self.fields)) > 1

    @property
    def m(self) -> int:
        n = self.split.n
        return n * (n - 1) // 2 - len(self.active)

    @property
    def box_measure(self) -> float:
        return float(np.prod([2.0 ** f.d_f for f in self.fields]))

    @property
    def id(self) -> str:
        if self.is_mixed:
            body = ",".join(f"({i},{j}){f.suffix}" for (i, j), f in self.active)
            return f"{self.split.label}:mixed:[{body}]"
        body = ",".join(f"({i},{j})" for i, j in self.pairs)
        return f"{self.split.label}:{self.field.label}:[{body}]"

    def __str__(self) -> str:
        return self.id

    _PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*([rcq]?)")

    @classmethod
    def from_id(cls, text: str) -> "ScenarioSpec":
        """Parse ``system:field:[(i,j),...]``.

        With field ``mixed`` every pair carries a suffix ``r``, ``c`` or
        ``q``; with a uniform field a suffix may still override it.
        """
        try:
            system, fld, body = text.strip().split(":", 2)
        except ValueError as exc:
            raise ValueError(f"malformed scenario id {text!r}") from exc
        split = SystemSplit.parse(system)
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"malformed pair list in {text!r}")
        inner = body[1:-1].strip()
        default = None if fld.strip().lower() == "mixed" else NumberField.parse(fld)
        active = []
        pos = 0
        while pos < len(inner):
            match = cls._PAIR.match(inner, pos)
            if not match:
                raise ValueError(f"malformed pair list in {text!r}")
            i, j, suf = match.groups()
            if suf:
                f = NumberField.parse(suf)
            elif default is not None:
                f = default
            else:
                raise ValueError(f"pair ({i},{j}) needs a field suffix in a mixed id")
            active.append(((int(i), int(j)), f))
            pos = match.end()
            rest = inner[pos:].lstrip()
            if rest.startswith(","):
                rest = rest[1:].lstrip()
            pos = len(inner) - len(rest)
        return cls(split, tuple(active))


def _as_z(value, fld: NumberField) -> np.ndarray | float | complex:
    if fld is NumberField.QUATERNION:
        arr = np.asarray(value, dtype=float)
        if arr.shape == ():
            arr = np.array([float(arr), 0.0, 0.0, 0.0])
        if arr.shape != (4,):
            raise ValueError("quaternion values need four components")
        return arr
    if fld is NumberField.COMPLEX:
        return complex(value)
    if np.iscomplexobj(value) and complex(value).imag != 0:
        raise ValueError("real pair given a complex value")
    return float(np.real(value))


def _sq_norm(z) -> float:
    return float(np.sum(np.abs(np.asarray(z)) ** 2))


@dataclass(frozen=True, eq=False)
class BlooreParams:
    """Diagonal simplex entries plus off-diagonal scale factors."""

    diag: np.ndarray
    offdiag: Mapping[Pair, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        d = np.array(self.diag, dtype=float)
        if d.ndim != 1 or np.any(d < 0) or abs(d.sum() - 1.0) > 1e-12:
            raise ValueError("diagonal must be a nonnegative vector summing to one")
        d.setflags(write=False)
        object.__setattr__(self, "diag", d)
        for pair, z in self.offdiag.items():
            if _sq_norm(z) > 1.0 + 1e-12:
                raise ValueError(f"|z{pair}|^2 exceeds one")
        object.__setattr__(self, "offdiag", dict(self.offdiag))


def assemble_density(p: BlooreParams, s: ScenarioSpec) -> DensityMatrix:
    """Build ``rho`` from Bloore parameters; positivity is not checked."""
    n = s.split.n
    if len(p.diag) != n:
        raise ValueError(f"diagonal has length {len(p.diag)}, split needs {n}")
    if set(p.offdiag) != set(s.pairs):
        raise ValueError("off-diagonal keys must equal the scenario's active pairs")
    fld = s.field
    d = p.diag
    if fld is NumberField.QUATERNION:
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = d
    else:
        data = np.diag(d).astype(complex if fld is NumberField.COMPLEX else float)
    for (i, j), pf in s.active:
        z = _as_z(p.offdiag[(i, j)], pf)
        if _sq_norm(z) > 1.0 + 1e-12:
            raise ValueError(f"|z{(i, j)}|^2 exceeds one")
        scale = math.sqrt(d[i - 1] * d[j - 1])
        if fld is NumberField.QUATERNION:
            q = z if pf is NumberField.QUATERNION else np.array(
                [np.real(z), np.imag(z), 0.0, 0.0])
            data[i - 1, j - 1] = scale * q
            data[j - 1, i - 1] = scale * quat_conj(q)
        else:
            data[i - 1, j - 1] = scale * z
            data[j - 1, i - 1] = scale * np.conj(z)
    return DensityMatrix(data, fld)


@dataclass(frozen=True)
class RatioVars:
    """Ratio variables of a split, in the split's canonical order."""

    split: SystemSplit
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        if len(vals) != len(self.split.ratio_defs):
            raise ValueError(
                f"{self.split.label} has {len(self.split.ratio_defs)} ratios, got {len(vals)}")
        if not all(v > 0 for v in vals):
            raise ValueError("ratio variables must be positive")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, name: str) -> float:
        return self.values[self.split.ratio_names.index(name)]

    @property
    def mu(self) -> float:
        if self.split is not SystemSplit.TWO_QUBIT:
            raise AttributeError("mu is defined for two qubits only")
        return math.sqrt(self.values[0])

    @property
    def eta(self) -> float:
        if self.split is not SystemSplit.QUBIT_QUTRIT:
            raise AttributeError("eta is defined for qubit-qutrit only")
        return self.values[0] * self.values[1]


def ratio_variables(diag, split: SystemSplit) -> RatioVars:
    d = np.asarray(diag, dtype=float)
    if d.shape != (split.n,):
        raise ValueError(f"diagonal must have length {split.n}")
    if np.any(d <= 0):
        raise ValueError("ratio variables need a strictly positive diagonal")
    vals = tuple(d[p - 1] * d[q - 1] / (d[s - 1] * d[t - 1]) for p, q, s, t in split.ratio_defs)
    return RatioVars(split, vals)


def canonical_diag(split: SystemSplit, r: RatioVars | Iterable[float]) -> np.ndarray:
    """A strictly positive simplex diagonal realising the given ratios.

    Uses the minimum-norm solution in log coordinates, which is symmetric
    under the split's block structure and reduces for two qubits to
    ``rho11 = rho44 = sqrt(nu) t``, ``rho22 = rho33 = t``.
    """
    vals = r.values if isinstance(r, RatioVars) else RatioVars(split, tuple(r)).values
    logs = np.log(np.asarray(vals))
    u = np.linalg.pinv(split.ratio_matrix) @ logs
    w = np.exp(u - u.max())
    return w / w.sum()


def solve_rho33_for_nu(r11: float, r22: float, nu: float) -> tuple[float, float, float]:
    """Complete a two-qubit diagonal from ``rho11``, ``rho22`` and ``nu``.

    Returns ``(rho33, rho44, d rho33 / d nu)``.
    """
    if not (r11 > 0 and r22 > 0 and r11 + r22 < 1 and nu > 0):
        raise ValueError("arguments must lie in the open simplex with nu > 0")
    rest = 1.0 - r11 - r22
    den = r11 + nu * r22
    r33 = r11 * rest / den
    return r33, rest - r33, -r11 * r22 * rest / den**2


_TOKEN = re.compile(r"\s*([*/])?\s*(eta|mu|nu\d?)\s*(?:\^\s*(-?\d+))?")


@dataclass(frozen=True)
class GridVariable:
    """A monomial in a split's ratio variables, e.g. ``"nu1*nu3/nu2"``.

    ``eta`` and ``mu`` are accepted as shorthands where they apply.
    """

    split: SystemSplit
    expr: str

    @cached_property
    def ratio_exponents(self) -> tuple[float, ...]:
        names = self.split.ratio_names
        exps = np.zeros(len(names))
        text = self.expr.replace(" ", "")
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or (pos > 0 and m.group(1) is None):
                raise ValueError(f"cannot parse grid variable {self.expr!r}")
            op, name, power = m.groups()
            k = float(power) if power else 1.0
            if op == "/":
                k = -k
            if name == "eta":
                if self.split is not SystemSplit.QUBIT_QUTRIT:
                    raise ValueError("eta is defined for qubit-qutrit only")
                exps[:2] += k
            elif name == "mu":
                exps[0] += 0.5 * k
            elif name in names:
                exps[names.index(name)] += k
            else:
                raise ValueError(f"{name} is not a ratio of {self.split.label}")
            pos = m.end()
        return tuple(exps)

    @cached_property
    def diag_exponents(self) -> np.ndarray:
        return np.asarray(self.ratio_exponents) @ self.split.ratio_matrix

    def four_entries(self) -> tuple[int, int, int, int]:
        """1-based ``(a, b, c, d)`` with the variable equal to ``rho_a rho_b/(rho_c rho_d)``."""
        e = self.diag_exponents
        num = [i + 1 for i in np.flatnonzero(np.isclose(e, 1.0))]
        den = [i + 1 for i in np.flatnonzero(np.isclose(e, -1.0))]
        if len(num) != 2 or len(den) != 2 or np.count_nonzero(np.abs(e) > 1e-12) != 4:
            raise ValueError(f"{self.expr} is not a ratio of four distinct diagonal entries")
        return num[0], num[1], den[0], den[1]

    def value(self, diag) -> float:
        d = np.asarray(diag, dtype=float)
        return float(np.exp(self.diag_exponents @ np.log(d)))

    def ratios_for(self, value: float) -> RatioVars:
        """Minimum-norm ratio values giving this monomial the requested value."""
        e = np.asarray(self.ratio_exponents)
        logs = e * math.log(value) / float(e @ e)
        return RatioVars(self.split, tuple(np.exp(logs)))

    def diag_for(self, value: float) -> np.ndarray:
        return canonical_diag(self.split, self.ratios_for(value))
