"""Positivity and PPT tests, single-matrix and batched.

Single matrices go through an eigenvalue solve. The batched routines used by
the Monte Carlo estimators work on unit-diagonal correlation matrices: since
``rho = D^(1/2) C D^(1/2)`` with ``D`` positive, ``rho`` is PSD exactly when
``C`` is, and the same holds after partial transposition because the
transpose leaves the diagonal alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .statespace import (
    DensityMatrix,
    NumberField,
    ScenarioSpec,
    SystemSplit,
    quat_conj,
)

__all__ = [
    "PsdTolerance",
    "PptVerdict",
    "minors_nonneg_2x2_real",
    "det_polynomial_2x2_real",
    "minor3_polynomial_2x2_real",
    "ppt_polynomial_nu",
    "ppt_condition_nu",
    "embed_quaternionic",
    "embed_quaternionic_array",
    "is_psd",
    "partial_transpose",
    "partial_transpose_array",
    "is_ppt",
    "psd_mask",
    "ScenarioTester",
    "ppt_mask_dense",
]


@dataclass(frozen=True)
class PsdTolerance:
    eps: float = 1e-10

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise ValueError("tolerance must be nonnegative")


@dataclass(frozen=True)
class PptVerdict:
    positive: bool
    min_eigenvalue: float
    method: str = "eigen"

    def __bool__(self) -> bool:
        return self.positive


_DEFAULT_TOL = PsdTolerance()


def _unpack6(z):
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != 6:
        raise ValueError("expected the six components z12, z13, z14, z23, z24, z34")
    return tuple(z[..., k] for k in range(6))


def det_polynomial_2x2_real(z):
    """``det(rho) / prod(rho_ii)`` for a real two-qubit state."""
    z12, z13, z14, z23, z24, z34 = _unpack6(z)
    return (
        (z34**2 - 1) * z12**2
        + 2 * (z14 * (z24 - z23 * z34) + z13 * (z23 - z24 * z34)) * z12
        - z23**2 - z24**2 - z34**2
        + z14**2 * (z23**2 - 1)
        + z13**2 * (z24**2 - 1)
        + 2 * z23 * z24 * z34
        + 2 * z13 * z14 * (z34 - z23 * z24)
        + 1
    )


def minor3_polynomial_2x2_real(z):
    """Leading 3x3 principal minor divided by ``rho11 rho22 rho33``."""
    z12, z13, _, z23, _, _ = _unpack6(z)
    return -z12**2 + 2 * z13 * z23 * z12 - z13**2 - z23**2 + 1


def minors_nonneg_2x2_real(z) -> bool | np.ndarray:
    """Diagonal-free minor test for a real two-qubit z-vector.

    ``z`` is ``(z12, z13, z14, z23, z24, z34)`` or a stack of such rows.
    """
    z = np.asarray(z, dtype=float)
    ok = (
        (det_polynomial_2x2_real(z) >= 0)
        & (minor3_polynomial_2x2_real(z) >= 0)
        & np.all(z**2 <= 1, axis=-1)
    )
    return bool(ok) if np.ndim(ok) == 0 else ok


def ppt_polynomial_nu(z, nu):
    """``nu * det(rho^T_B) / prod(rho_ii)`` for a real two-qubit state."""
    z12, z13, z14, z23, z24, z34 = _unpack6(z)
    s = np.sqrt(nu)
    return (
        nu * (z34**2 - 1) * z12**2
        + 2 * s * (nu * z13 * z14 + z23 * z24 - s * (z14 * z23 + z13 * z24) * z34) * z12
        - z23**2 - nu * z34**2 + nu
        + nu * ((z24**2 - 1) * z13**2 - 2 * z14 * z23 * z24 * z13 - z24**2
                + z14**2 * (z23**2 - nu))
        + 2 * s * (z13 * z23 + nu * z14 * z24) * z34
    )


def ppt_condition_nu(z, nu: float) -> bool | np.ndarray:
    """PPT test written in the ratio variable; valid for PSD configurations."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    ok = ppt_polynomial_nu(z, nu) >= 0
    return bool(ok) if np.ndim(ok) == 0 else ok


def embed_quaternionic_array(q: np.ndarray) -> np.ndarray:
    """Symplectic embedding of ``(..., n, n, 4)`` quaternion arrays.

    Each entry ``a + bi + cj + dk`` becomes ``[[a+bi, c+di], [-c+di, a-bi]]``.
    """
    q = np.asarray(q, dtype=float)
    *lead, n, m, four = q.shape
    if four != 4:
        raise ValueError("last axis must hold four quaternion components")
    alpha = q[..., 0] + 1j * q[..., 1]
    beta = q[..., 2] + 1j * q[..., 3]
    out = np.empty((*lead, n, 2, m, 2), dtype=complex)
    out[..., :, 0, :, 0] = alpha
    out[..., :, 0, :, 1] = beta
    out[..., :, 1, :, 0] = -np.conj(beta)
    out[..., :, 1, :, 1] = np.conj(alpha)
    return out.reshape(*lead, 2 * n, 2 * m)


def embed_quaternionic(rho: DensityMatrix) -> DensityMatrix:
    """Complex ``2n x 2n`` image of a quaternionic matrix (trace doubles)."""
    if rho.field is not NumberField.QUATERNION:
        data = rho.data.astype(complex)
        z = np.zeros_like(data)
        return DensityMatrix(np.block([[data, z], [z, data.conj()]]), NumberField.COMPLEX)
    return DensityMatrix(embed_quaternionic_array(rho.data), NumberField.COMPLEX)


def _eigvals(rho: DensityMatrix) -> np.ndarray:
    if not rho.is_self_adjoint():
        raise ValueError("matrix is not self-adjoint")
    if rho.field is NumberField.QUATERNION:
        return np.linalg.eigvalsh(embed_quaternionic_array(rho.data))
    return np.linalg.eigvalsh(rho.data)


def is_psd(rho: DensityMatrix, tol: PsdTolerance = _DEFAULT_TOL) -> PptVerdict:
    lam = float(_eigvals(rho)[0])
    return PptVerdict(lam >= -tol.eps, lam, "eigen")


def _pt_index(n: int, block: int) -> tuple[np.ndarray, np.ndarray]:
    r, c = np.indices((n, n))
    a_r, x_r = np.divmod(r, block)
    a_c, x_c = np.divmod(c, block)
    return a_r * block + x_c, a_c * block + x_r


def partial_transpose_array(data: np.ndarray, split: SystemSplit) -> np.ndarray:
    """Block partial transpose over the two leading matrix axes after any batch axes.

    Works for ``(..., n, n)`` and quaternionic ``(..., n, n, 4)`` arrays when
    told which axes are the matrix axes; here the matrix axes are the last two
    for real/complex data.
    """
    n = split.n
    rows, cols = _pt_index(n, split.block)
    out = np.empty_like(data)
    out[..., rows, cols] = data[..., np.arange(n)[:, None], np.arange(n)[None, :]]
    return out


def partial_transpose(rho: DensityMatrix, split: SystemSplit) -> DensityMatrix:
    if rho.n != split.n:
        raise ValueError(f"matrix is {rho.n}x{rho.n}, split {split.label} needs {split.n}")
    if rho.field is NumberField.QUATERNION:
        moved = np.moveaxis(rho.data, 2, 0)
        return DensityMatrix(np.moveaxis(partial_transpose_array(moved, split), 0, 2),
                             rho.field)
    return DensityMatrix(partial_transpose_array(rho.data, split), rho.field)


def is_ppt(rho: DensityMatrix, split: SystemSplit, tol: PsdTolerance = _DEFAULT_TOL) -> bool:
    return is_psd(partial_transpose(rho, split), tol).positive


# ---------------------------------------------------------------------------
# Batched tests

_PIVOT_BAND = 1e-8


def psd_mask(mats: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    """PSD verdict for a stack ``(N, k, k)`` of Hermitian matrices.

    Intended for matrices with unit-scale diagonals. Sizes one and two use
    closed forms; larger sizes run a vectorised LDL^H factorisation and fall
    back to an eigensolve for rows whose pivots land near zero.
    """
    mats = np.asarray(mats)
    N, k = mats.shape[0], mats.shape[-1]
    if N == 0:
        return np.zeros(0, dtype=bool)
    if k == 1:
        return mats[:, 0, 0].real >= -eps
    if k == 2:
        a, d = mats[:, 0, 0].real, mats[:, 1, 1].real
        b2 = np.abs(mats[:, 0, 1]) ** 2
        lam = 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + b2)
        return lam >= -eps
    work = np.array(mats, copy=True)
    ok = np.ones(N, dtype=bool)
    unsure = np.zeros(N, dtype=bool)
    for j in range(k):
        piv = work[:, j, j].real
        ok &= piv >= -_PIVOT_BAND
        unsure |= np.abs(piv) <= _PIVOT_BAND
        if j + 1 < k:
            safe = np.where(piv > _PIVOT_BAND, piv, 1.0)
            col = work[:, j + 1:, j] / safe[:, None]
            work[:, j + 1:, j + 1:] -= col[:, :, None] * work[:, j, None, j + 1:]
    redo = ok & unsure
    if redo.any():
        ok[redo] = np.linalg.eigvalsh(mats[redo])[:, 0] >= -eps
    return ok


def _components(n: int, pairs) -> list[list[int]]:
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in pairs:
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i, j in pairs:
        for v in (i, j):
            groups.setdefault(find(v), [])
    for v in range(1, n + 1):
        r = find(v)
        if r in groups:
            groups[r].append(v)
    return [sorted(set(g)) for g in groups.values()]


@dataclass(frozen=True)
class _Edge:
    source: int      # index into the z batch
    row: int         # 1-based upper-triangular position
    col: int
    conj: bool
    left: int        # 1-based original indices, for diagonal rescaling
    right: int


class ScenarioTester:
    """Vectorised feasibility and PPT tests for one scenario.

    ``z`` batches have shape ``(N, P, 4)``: one row of four real components
    per active pair, of which only the first ``d_f`` are used.
    """

    def __init__(self, spec: ScenarioSpec, eps: float = 1e-10):
        self.spec = spec
        self.eps = eps
        self.field = spec.field
        pairs = spec.pairs
        self._edges = [_Edge(k, i, j, False, i, j) for k, (i, j) in enumerate(pairs)]
        moved = []
        for k, (i, j) in enumerate(pairs):
            r, c = spec.split.pt_position(i, j)
            moved.append(_Edge(k, min(r, c), max(r, c), r > c, i, j))
        self._pt_edges = moved

    @cached_property
    def _plain_components(self):
        return self._group(self._edges)

    @cached_property
    def _pt_components(self):
        return self._group(self._pt_edges)

    def _group(self, edges):
        comps = _components(self.spec.split.n, [(e.row, e.col) for e in edges])
        return [(c, [e for e in edges if e.row in c]) for c in comps]

    def _values(self, z: np.ndarray) -> np.ndarray:
        if self.field is NumberField.REAL:
            return z[..., 0]
        if self.field is NumberField.COMPLEX:
            return z[..., 0] + 1j * z[..., 1]
        return z

    def _test(self, vals, comps, scale=None) -> np.ndarray:
        N = vals.shape[0]
        ok = np.ones(N, dtype=bool)
        quat = self.field is NumberField.QUATERNION
        for verts, edges in comps:
            k = len(verts)
            where = {v: t for t, v in enumerate(verts)}
            if quat:
                mat = np.zeros((N, k, k, 4))
                mat[:, np.arange(k), np.arange(k), 0] = 1.0
            else:
                mat = np.zeros((N, k, k), dtype=vals.dtype)
                mat[:, np.arange(k), np.arange(k)] = 1.0
            for e in edges:
                v = vals[:, e.source]
                if scale is not None:
                    v = v * scale[e.source]
                if e.conj:
                    v = quat_conj(v) if quat else np.conj(v)
                r, c = where[e.row], where[e.col]
                mat[:, r, c] = v
                mat[:, c, r] = quat_conj(v) if quat else np.conj(v)
            if quat:
                mat = embed_quaternionic_array(mat)
            idx = np.flatnonzero(ok)
            if idx.size == 0:
                break
            ok[idx] = psd_mask(mat[idx], self.eps)
        return ok

    def feasible(self, z: np.ndarray) -> np.ndarray:
        """Whether each z-vector gives a PSD matrix (for any positive diagonal)."""
        return self._test(self._values(z), self._plain_components)

    def ppt_scales(self, diag) -> np.ndarray:
        d = np.asarray(diag, dtype=float)
        return np.array([
            math.sqrt(d[e.left - 1] * d[e.right - 1] / (d[e.row - 1] * d[e.col - 1]))
            for e in self._pt_edges
        ])

    def ppt(self, z: np.ndarray, diag, feasible: np.ndarray | None = None) -> np.ndarray:
        """PPT verdict of each z-vector at the given diagonal.

        Rows marked infeasible are reported as ``False`` without testing.
        """
        vals = self._values(z)
        scale = self.ppt_scales(diag)
        if self.field is NumberField.QUATERNION:
            scale = scale[:, None]
        if feasible is None:
            return self._test(vals, self._pt_components, scale)
        out = np.zeros(vals.shape[0], dtype=bool)
        idx = np.flatnonzero(feasible)
        out[idx] = self._test(vals[idx], self._pt_components, scale)
        return out


def ppt_mask_dense(rhos: np.ndarray, split: SystemSplit, eps: float = 1e-10) -> np.ndarray:
    """PPT verdicts for a stack of PSD real/complex density matrices."""
    pt = partial_transpose_array(rhos, split)
    d = np.sqrt(np.einsum("nii->ni", rhos).real)
    corr = pt / (d[:, :, None] * d[:, None, :])
    return psd_mask(corr, eps)
