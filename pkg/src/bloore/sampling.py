"""Random and quasi-random generators: z-boxes, CAD and spheroidal samplers, HS states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .statespace import DensityMatrix, NumberField, ScenarioSpec

__all__ = [
    "RngStream",
    "CadLimits",
    "cad_limits",
    "sample_z_box",
    "sample_z_cad",
    "SpheroidalSample",
    "sample_spheroidal",
    "spheroidal_to_z",
    "ginibre_states",
    "sample_hs_density",
    "correlation_from_states",
    "sample_correlation_z",
    "low_discrepancy_stream",
    "QmcStream",
]


@dataclass
class RngStream:
    """A reproducible random stream keyed by ``(seed, stream_id)``.

    Different stream ids give statistically independent generators through
    ``SeedSequence`` spawn keys, so shard results never depend on scheduling.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def child(self, key: int) -> "RngStream":
        """An independent sub-stream, e.g. one per grid point."""
        return RngStream(self.seed, self.stream_id * 1_000_003 + int(key) + 1)

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        return self.generator.uniform(low, high, size)

    def normal(self, size=None) -> np.ndarray:
        return self.generator.standard_normal(size)


class QmcStream:
    """Scrambled Sobol points exposed through the ``uniform`` interface of :class:`RngStream`.

    Each call consumes the next block of the sequence. Draws of shape
    ``(N, ...)`` use one Sobol point of dimension ``prod(shape[1:])`` per row.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._engines: dict[int, qmc.Sobol] = {}

    def _engine(self, dim: int) -> qmc.Sobol:
        if dim not in self._engines:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, dim))
            self._engines[dim] = qmc.Sobol(dim, scramble=True, seed=np.random.default_rng(ss))
        return self._engines[dim]

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        shape = (size,) if isinstance(size, int) else tuple(size)
        dim = int(np.prod(shape[1:])) if len(shape) > 1 else 1
        if dim > 64:
            raise ValueError("low-discrepancy draws are limited to 64 dimensions")
        pts = self._engine(dim).random(shape[0]).reshape(shape)
        return low + (high - low) * pts


def low_discrepancy_stream(dim: int, start: int, count: int, seed: int = 0) -> np.ndarray:
    """Points ``start .. start+count-1`` of a scrambled Sobol sequence in ``[0,1)^dim``."""
    if not 1 <= dim <= 64:
        raise ValueError("dim must be between 1 and 64")
    if start < 0 or count < 0:
        raise ValueError("index range must be nonnegative")
    eng = qmc.Sobol(dim, scramble=True, seed=np.random.default_rng(seed))
    if start:
        eng.fast_forward(start)
    return eng.random(count)


# --- z-vectors -------------------------------------------------------------

def sample_z_box(s: ScenarioSpec, rng, size: int) -> np.ndarray:
    """Uniform draws from the product of ``[-1,1]^{d_f}`` boxes, shape ``(size, P, 4)``.

    Components beyond each pair's ``d_f`` are zero.
    """
    dims = [f.d_f for f in s.fields]
    u = rng.uniform(-1.0, 1.0, (size, sum(dims)))
    z = np.zeros((size, len(dims), 4))
    pos = 0
    for k, d in enumerate(dims):
        z[:, k, :d] = u[:, pos:pos + d]
        pos += d
    return z


@dataclass(frozen=True)
class CadLimits:
    """Conditional intervals for the real two-qubit shape variables."""

    z23: tuple[np.ndarray, np.ndarray]
    z24: tuple[np.ndarray, np.ndarray]
    z34: tuple[np.ndarray, np.ndarray] | None = None
    s: np.ndarray | None = None


def cad_limits(z12, z13, z14, z23=None, z24=None) -> CadLimits:
    """Bounds for z23, z24 and, when those are given, z34."""
    z12, z13, z14 = (np.asarray(v, dtype=float) for v in (z12, z13, z14))
    c12 = np.sqrt(np.clip(1.0 - z12**2, 0.0, None))
    h23 = c12 * np.sqrt(np.clip(1.0 - z13**2, 0.0, None))
    h24 = c12 * np.sqrt(np.clip(1.0 - z14**2, 0.0, None))
    lim23 = (z12 * z13 - h23, z12 * z13 + h23)
    lim24 = (z12 * z14 - h24, z12 * z14 + h24)
    if z23 is None or z24 is None:
        return CadLimits(lim23, lim24)
    z23, z24 = np.asarray(z23, dtype=float), np.asarray(z24, dtype=float)
    a = -1.0 + z12**2 + z13**2 - 2.0 * z12 * z13 * z23 + z23**2
    b = -1.0 + z12**2 + z14**2 - 2.0 * z12 * z14 * z24 + z24**2
    # Both factors are <= 0 inside the CAD cell; their product is what matters.
    s = np.sqrt(np.abs(a) * np.abs(b))
    mid = z13 * z14 - z12 * z14 * z23 - z12 * z13 * z24 + z23 * z24
    den = 1.0 - z12**2
    return CadLimits(lim23, lim24, ((mid - s) / den, (mid + s) / den), s)


def sample_z_cad(rng, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Feasible real two-qubit z-vectors ``(z12, z13, z14, z23, z24, z34)``.

    Returns the points and their importance weights (the product of the
    interval lengths times the 8 of the outer cube), so ``weights.mean()``
    estimates the measure of the feasible set.
    """
    u = rng.uniform(0.0, 1.0, (size, 6))
    z12, z13, z14 = 2.0 * u[:, :3].T - 1.0
    lim = cad_limits(z12, z13, z14)
    z23 = lim.z23[0] + (lim.z23[1] - lim.z23[0]) * u[:, 3]
    z24 = lim.z24[0] + (lim.z24[1] - lim.z24[0]) * u[:, 4]
    full = cad_limits(z12, z13, z14, z23, z24)
    lo, hi = full.z34
    z34 = lo + (hi - lo) * u[:, 5]
    w = 8.0 * (lim.z23[1] - lim.z23[0]) * (lim.z24[1] - lim.z24[0]) * (hi - lo)
    return np.column_stack([z12, z13, z14, z23, z24, z34]), w


@dataclass(frozen=True)
class SpheroidalSample:
    gamma1: np.ndarray
    gamma2: np.ndarray
    Z34: np.ndarray
    z12: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    jacobian: np.ndarray
    z: np.ndarray          # mapped (N, 6) z-vectors
    weight: np.ndarray     # jacobian times the sampling-box volume element


def spheroidal_to_z(gamma1, gamma2, Z34, z12, theta1, theta2) -> np.ndarray:
    """Map spheroidal coordinates to the six real z's.

    Each of ``(z13, z23)`` and ``(z14, z24)`` is a point on an ellipse with
    semi-axes ``sqrt(1 -+ z12)``, rotated by a quarter turn and shrunk by
    ``R1 = sqrt(1 - g1 g2)`` or ``R2 = sqrt(1 - g1/g2)``.
    """
    g1, g2 = np.asarray(gamma1, float), np.asarray(gamma2, float)
    r1 = np.sqrt(np.clip(1.0 - g1 * g2, 0.0, None))
    r2 = np.sqrt(np.clip(1.0 - g1 / g2, 0.0, None))
    sm, sp = np.sqrt(1.0 - z12), np.sqrt(1.0 + z12)
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    root2 = math.sqrt(2.0)
    z13 = (sm * c1 + sp * s1) * r1 / root2
    z23 = (sp * s1 - sm * c1) * r1 / root2
    z14 = (sm * c2 + sp * s2) * r2 / root2
    z24 = (sp * s2 - sm * c2) * r2 / root2
    z34 = Z34 + r1 * r2 * np.cos(np.asarray(theta1) - theta2)
    return np.stack(np.broadcast_arrays(z12, z13, z14, z23, z24, z34), axis=-1)


def sample_spheroidal(rng, size: int) -> SpheroidalSample:
    """Uniform draws in the spheroidal box, mapped to z-space with weights.

    ``weight.mean()`` estimates the measure of the real two-qubit feasible set.
    """
    u = rng.uniform(0.0, 1.0, (size, 6))
    g1 = np.clip(u[:, 0], 1e-300, None)
    g2 = g1 + (1.0 / g1 - g1) * u[:, 1]
    Z34 = g1 * (2.0 * u[:, 2] - 1.0)
    z12 = 2.0 * u[:, 3] - 1.0
    t1, t2 = 2.0 * math.pi * u[:, 4], 2.0 * math.pi * u[:, 5]
    jac = (1.0 - z12**2) * g1 / (2.0 * g2)
    # (1/g1 - g1) * g1 stays bounded, so the weights are too.
    box = (1.0 / g1 - g1) * (2.0 * g1) * 2.0 * (2.0 * math.pi) ** 2
    return SpheroidalSample(g1, g2, Z34, z12, t1, t2, jac,
                            spheroidal_to_z(g1, g2, Z34, z12, t1, t2), jac * box)


# --- Hilbert-Schmidt states -------------------------------------------------

def ginibre_states(n: int, fld: NumberField, rng, size: int) -> np.ndarray:
    """A stack of HS-distributed density matrices, shape ``(size, n, n)``.

    ``rho = A A^dagger / tr(A A^dagger)`` with Gaussian ``A``. The flat measure
    needs ``A`` of shape ``n x (n+1)`` for real entries and ``n x n`` for
    complex ones. The quaternionic analogue would need ``n - 1/2`` columns,
    so it is not available.
    """
    g = rng.generator if hasattr(rng, "generator") else rng
    if fld is NumberField.REAL:
        a = g.standard_normal((size, n, n + 1))
    elif fld is NumberField.COMPLEX:
        a = g.standard_normal((size, n, n)) + 1j * g.standard_normal((size, n, n))
    else:
        raise ValueError("no Ginibre construction gives the quaternionic HS measure")
    rho = a @ np.conj(np.swapaxes(a, 1, 2))
    tr = np.einsum("nii->n", rho).real
    return rho / tr[:, None, None]


def sample_hs_density(n: int, fld: NumberField, rng) -> DensityMatrix:
    if n not in (4, 6, 8, 9):
        raise ValueError("n must be one of 4, 6, 8, 9")
    rho = ginibre_states(n, fld, rng, 1)[0]
    rho = 0.5 * (rho + np.conj(rho.T))
    return DensityMatrix(rho.real if fld is NumberField.REAL else rho, fld)


def correlation_from_states(rhos: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.einsum("nii->ni", rhos).real)
    return rhos / (d[:, :, None] * d[:, None, :])


def sample_correlation_z(s: ScenarioSpec, rng, size: int) -> np.ndarray:
    """Uniform draws from the feasible z-set of a full real or complex scenario.

    Under the flat measure the Bloore volume element factorises into a
    diagonal part and a constant in z, so the unit-diagonal correlation
    matrix of an HS state is uniform on the feasible set. Output has the
    ``(size, P, 4)`` layout of :func:`sample_z_box`.
    """
    if s.is_mixed or s.m != 0:
        raise ValueError("correlation sampling needs a full single-field scenario")
    corr = correlation_from_states(ginibre_states(s.split.n, s.field, rng, size))
    z = np.zeros((size, len(s.pairs), 4))
    for k, (i, j) in enumerate(s.pairs):
        v = corr[:, i - 1, j - 1]
        z[:, k, 0] = v.real
        if s.field is NumberField.COMPLEX:
            z[:, k, 1] = v.imag
    return z
