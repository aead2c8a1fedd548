"""Monte Carlo separability functions, volume assembly, direct HS estimates and fits.

The scenario estimator works in Bloore coordinates. For a fixed diagonal,
``S`` is the Lebesgue measure of the z-vectors that give a PSD and PPT
matrix, estimated as ``box_measure * n_ppt / N`` from uniform box draws.
By default one batch of z-draws is tested at every grid point (common random
numbers), which costs one feasibility test per draw and lets the assembled
probability carry an exact delta-method variance.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .jacobians import JacobianSpec, jac_integral, marginal_jacobian
from .positivity import ScenarioTester, ppt_mask_dense, psd_mask
from .quadrature import integrate_1d
from .sampling import (
    QmcStream,
    RngStream,
    ginibre_states,
    sample_correlation_z,
    sample_z_box,
)
from .statespace import (
    GridVariable,
    NumberField,
    ScenarioSpec,
    SystemSplit,
    canonical_diag,
)

__all__ = [
    "SepFunctionTable",
    "ProbabilityEstimate",
    "VolumeResult",
    "dirichlet_alphas",
    "scenario_jacobian",
    "assembly_nodes",
    "estimate_sepfunc",
    "assemble_probability",
    "estimate_prob",
    "estimate_prob_direct",
    "estimate_prob_scenario",
    "upper_bound_minor_relaxation",
    "fit_exponent",
    "eta_coalescence_test",
    "CONDITIONS",
]


# --- result containers -------------------------------------------------------

@dataclass
class SepFunctionTable:
    """Per-grid-point counts for a separability function.

    ``grid`` holds the grid-variable values, or one row of ratio values per
    point when ``variable`` names several ratios (e.g. ``"nu1,nu2"``).
    """

    scenario: str
    variable: str
    grid: np.ndarray
    n_total: np.ndarray
    n_feasible: np.ndarray
    n_ppt: np.ndarray
    measure: float
    moments: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if np.any(self.n_ppt > self.n_feasible) or np.any(self.n_feasible > self.n_total):
            raise ValueError("counts must satisfy ppt <= feasible <= total")

    @property
    def estimate(self) -> np.ndarray:
        return self.measure * self.n_ppt / self.n_total

    @property
    def std_err(self) -> np.ndarray:
        p = self.n_ppt / self.n_total
        return self.measure * np.sqrt(p * (1.0 - p) / self.n_total)

    @property
    def c_estimate(self) -> np.ndarray:
        return self.measure * self.n_feasible / self.n_total

    @property
    def c_std_err(self) -> np.ndarray:
        q = self.n_feasible / self.n_total
        return self.measure * np.sqrt(q * (1.0 - q) / self.n_total)

    @property
    def normalized(self) -> np.ndarray:
        """``S / c`` at each point: the PPT fraction among feasible draws."""
        return self.n_ppt / np.maximum(self.n_feasible, 1)

    @property
    def normalized_std_err(self) -> np.ndarray:
        f = self.normalized
        return np.sqrt(f * (1.0 - f) / np.maximum(self.n_feasible, 1))

    def ratio_columns(self) -> tuple[np.ndarray, np.ndarray | None]:
        g = np.asarray(self.grid, dtype=float)
        if g.ndim == 1:
            return g, None
        return g[:, 0], g[:, 1] if g.shape[1] > 1 else None


@dataclass(frozen=True)
class ProbabilityEstimate:
    p_hat: float
    std_err: float
    n: int
    target: float | None = None
    target_expr: str | None = None

    @property
    def z_score(self) -> float | None:
        if self.target is None:
            return None
        if self.std_err == 0:
            return 0.0 if self.p_hat == self.target else math.inf
        return (self.p_hat - self.target) / self.std_err

    @property
    def rel_error(self) -> float | None:
        if self.target is None:
            return None
        return abs(self.p_hat - self.target) / abs(self.target)


@dataclass(frozen=True)
class VolumeResult:
    v_sep: float
    v_tot: float
    p: float
    p_std_err: float = 0.0


# --- scenario weights --------------------------------------------------------

def dirichlet_alphas(spec: ScenarioSpec) -> np.ndarray:
    """One plus the exponent of each diagonal entry in the Bloore volume element.

    Each active pair ``(i, j)`` contributes ``(rho_ii rho_jj)**(d_f/2)``.
    """
    a = np.ones(spec.split.n)
    for (i, j), f in spec.active:
        a[i - 1] += 0.5 * f.d_f
        a[j - 1] += 0.5 * f.d_f
    return a


def scenario_jacobian(spec: ScenarioSpec, variable: str) -> JacobianSpec:
    """Marginal jacobian of a four-entry grid variable under the scenario weight."""
    entries = GridVariable(spec.split, variable).four_entries()
    return JacobianSpec.for_weights(dirichlet_alphas(spec), entries)


def assembly_nodes(jspec: JacobianSpec, points: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on ``(0, inf)`` with ``J`` folded into the weights.

    ``points`` nodes go on ``[0, 1]`` through ``nu = t**2`` and as many on
    ``[1, inf)`` through ``nu = 1/t**2``, so ``sum(w * f(nodes))``
    approximates ``int f J``. The split at 1 keeps the usual kink of ``S``
    on a panel boundary.
    """
    x, w = np.polynomial.legendre.leggauss(points)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    lo = t**2
    w_lo = wt * 2.0 * t * marginal_jacobian(lo, jspec)
    w_hi = wt * 2.0 * t * marginal_jacobian(lo, jspec.swapped())
    return np.concatenate([lo, 1.0 / lo[::-1]]), np.concatenate([w_lo, w_hi[::-1]])


# --- Monte Carlo engine --------------------------------------------------------

def _cond_ppt(tester: ScenarioTester, z, diag, feas):
    return tester.ppt(z, diag, feas)


def _nu_of(diag) -> float:
    return diag[0] * diag[3] / (diag[1] * diag[2])


def _cond_z14(tester, z, diag, feas):
    k = tester.spec.pairs.index((1, 4))
    return feas & (1.0 - _nu_of(diag) * z[:, k, 0] ** 2 >= 0.0)


def _cond_z23(tester, z, diag, feas):
    k = tester.spec.pairs.index((2, 3))
    return feas & (_nu_of(diag) - z[:, k, 0] ** 2 >= 0.0)


def _cond_both(tester, z, diag, feas):
    return _cond_z14(tester, z, diag, feas) & _cond_z23(tester, z, diag, feas)


CONDITIONS: dict[str, Callable] = {
    "ppt": _cond_ppt,
    "z14": _cond_z14,
    "z23": _cond_z23,
    "combined": _cond_both,
}


@dataclass(frozen=True)
class _Job:
    scenario: str
    diags: np.ndarray
    n: int
    seed: int
    shard: int
    sampler: str
    qmc: bool
    chunk: int
    weights: np.ndarray | None
    common: bool
    condition: str
    eps: float


def _draw(spec: ScenarioSpec, rng, size: int, sampler: str) -> np.ndarray:
    if sampler == "box":
        return sample_z_box(spec, rng, size)
    if sampler == "correlation":
        return sample_correlation_z(spec, rng, size)
    raise ValueError(f"unknown sampler {sampler!r}")


def _run_job(job: _Job) -> dict:
    spec = ScenarioSpec.from_id(job.scenario)
    tester = ScenarioTester(spec, job.eps)
    cond = CONDITIONS[job.condition]
    K = len(job.diags)
    feas_n = np.zeros(K, dtype=np.int64)
    ppt_n = np.zeros(K, dtype=np.int64)
    mom = np.zeros(5)  # sums of y, y^2, x, x^2, xy

    def stream(key):
        if job.qmc:
            return QmcStream(job.seed, job.shard * 1_000_003 + key)
        return RngStream(job.seed, job.shard).child(key)

    if job.common:
        rng = stream(0)
        left = job.n
        wsum = None if job.weights is None else float(np.sum(job.weights))
        while left > 0:
            m = min(job.chunk, left)
            draw = job.chunk if job.qmc else m  # keep Sobol blocks balanced
            z = _draw(spec, rng, draw, job.sampler)[:m]
            feas = tester.feasible(z) if job.sampler == "box" else np.ones(m, dtype=bool)
            nf = int(feas.sum())
            y = np.zeros(m) if job.weights is not None else None
            for k, d in enumerate(job.diags):
                ok = cond(tester, z, d, feas)
                ppt_n[k] += int(ok.sum())
                if y is not None:
                    y += job.weights[k] * ok
            feas_n += nf
            if y is not None:
                x = wsum * feas
                mom += [y.sum(), (y * y).sum(), x.sum(), (x * x).sum(), (x * y).sum()]
            left -= m
    else:
        for k, d in enumerate(job.diags):
            rng = stream(k)
            left = job.n
            while left > 0:
                m = min(job.chunk, left)
                draw = job.chunk if job.qmc else m
                z = _draw(spec, rng, draw, job.sampler)[:m]
                feas = tester.feasible(z) if job.sampler == "box" else np.ones(m, dtype=bool)
                feas_n[k] += int(feas.sum())
                ppt_n[k] += int(cond(tester, z, d, feas).sum())
                left -= m
    return {"feasible": feas_n, "ppt": ppt_n, "moments": mom}


def _diags_for(spec: ScenarioSpec, grid, variable: str | None) -> tuple[np.ndarray, str]:
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0):
        raise ValueError("grid values must be positive")
    if g.ndim == 1:
        var = variable or spec.split.ratio_names[0]
        gv = GridVariable(spec.split, var)
        return np.array([gv.diag_for(v) for v in g]), var
    var = variable or ",".join(spec.split.ratio_names[: g.shape[1]])
    names = [s.strip() for s in var.split(",")]
    if names != list(spec.split.ratio_names[: len(names)]) or len(names) != g.shape[1]:
        raise ValueError("tuple grids must list the leading ratio variables in order")
    full = np.ones((len(g), len(spec.split.ratio_names)))
    full[:, : g.shape[1]] = g
    return np.array([canonical_diag(spec.split, row) for row in full]), var


def estimate_sepfunc(
    spec: ScenarioSpec | str,
    grid: Sequence[float] | np.ndarray,
    n_samples: int,
    seed: int = 0,
    *,
    variable: str | None = None,
    shards: int = 1,
    workers: int = 1,
    qmc: bool = False,
    sampler: str = "box",
    measure: float | None = None,
    weights: np.ndarray | None = None,
    common_draws: bool = True,
    condition: str = "ppt",
    chunk: int = 1 << 16,
    eps: float = 1e-10,
) -> SepFunctionTable:
    """Estimate ``S`` at each grid point from ``n_samples`` z-draws per point.

    ``variable`` names the grid variable (``"nu"``, ``"eta"``,
    ``"nu1*nu3/nu2"``...). A 2-D ``grid`` gives ratio tuples instead.
    ``sampler="correlation"`` draws uniformly from the feasible set of a full
    scenario; then ``measure`` should be that set's volume (default 1, i.e.
    normalised output). With ``weights`` (one per grid point, typically from
    :func:`assembly_nodes`) the per-draw moments needed by
    :func:`assemble_probability` are accumulated as well.
    """
    if isinstance(spec, str):
        spec = ScenarioSpec.from_id(spec)
    n_samples = int(n_samples)
    if n_samples < 1 or shards < 1:
        raise ValueError("need at least one sample and one shard")
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    diags, var = _diags_for(spec, grid, variable)
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(diags),):
            raise ValueError("need one weight per grid point")
        if not common_draws:
            raise ValueError("assembly moments need common draws across grid points")
    if measure is None:
        measure = spec.box_measure if sampler == "box" else 1.0
    base, extra = divmod(n_samples, shards)
    jobs = [
        _Job(spec.id, diags, base + (j < extra), int(seed), j, sampler, qmc, chunk,
             weights, common_draws, condition, eps)
        for j in range(shards) if base + (j < extra) > 0
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_job, jobs))
    else:
        parts = [_run_job(j) for j in jobs]
    feas = sum(p["feasible"] for p in parts)
    ppt = sum(p["ppt"] for p in parts)
    moments = None
    if weights is not None:
        m = sum(p["moments"] for p in parts)
        moments = dict(zip(("y", "yy", "x", "xx", "xy"), m.tolist()))
        moments["n"] = n_samples
        moments["weights"] = weights
    grid_arr = np.asarray(grid, dtype=float)
    meta = {"seed": int(seed), "shards": int(shards), "sampler": sampler,
            "qmc": "sobol-scrambled" if qmc else None, "common_draws": common_draws,
            "condition": condition}
    return SepFunctionTable(spec.id, var, grid_arr, np.full(len(diags), n_samples),
                            feas, ppt, float(measure), moments, meta)


# --- assembly --------------------------------------------------------------------

def _ratio_from_moments(mom: dict) -> tuple[float, float]:
    n = mom["n"]
    my, mx = mom["y"] / n, mom["x"] / n
    if mx == 0:
        raise ValueError("no feasible draws")
    p = my / mx
    vy = mom["yy"] / n - my**2
    vx = mom["xx"] / n - mx**2
    cxy = mom["xy"] / n - mx * my
    var = (vy - 2.0 * p * cxy + p * p * vx) / (n * mx * mx)
    return p, math.sqrt(max(var, 0.0))


def assemble_probability(
    S: SepFunctionTable | Callable[[np.ndarray], np.ndarray],
    c: float | None,
    spec: JacobianSpec,
    rel_tol: float = 1e-10,
) -> VolumeResult:
    """``V_sep = int S J``, ``V_tot = c int J`` and their ratio.

    ``S`` may be an exact vectorised callable or a Monte Carlo table. A table
    carrying assembly moments uses the ratio estimator directly (``c`` may
    then be ``None``). Other tables are interpolated by a monotone cubic in
    ``sqrt(nu)`` and held constant outside the grid.
    """
    jint = jac_integral(spec)
    if isinstance(S, SepFunctionTable):
        if S.moments is not None:
            p, se = _ratio_from_moments(S.moments)
            cc = float(np.mean(S.c_estimate)) if c is None else c
            return VolumeResult(p * cc * jint, cc * jint, p, se)
        if c is None:
            c = float(np.mean(S.c_estimate))
        g = np.asarray(S.grid, dtype=float)
        if g.ndim != 1:
            raise ValueError("interpolated assembly needs a one-variable grid")
        order = np.argsort(g)
        root = np.sqrt(g[order])
        nodes, w = assembly_nodes(spec)

        def vsep(values):
            f = PchipInterpolator(root, values[order], extrapolate=False)
            r = np.clip(np.sqrt(nodes), root[0], root[-1])
            return float(np.sum(w * f(r)))

        est, se = S.estimate, S.std_err
        v = vsep(est)
        # Propagate per-point errors through the (locally linear) interpolant.
        grad = np.empty(len(g))
        for k in range(len(g)):
            h = np.zeros(len(g))
            h[k] = max(se[k], 1e-12)
            grad[k] = (vsep(est + h) - v) / h[k]
        v_se = math.sqrt(float(np.sum((grad * se) ** 2)))
        vt = c * jint
        return VolumeResult(v, vt, v / vt, v_se / vt)
    if c is None:
        raise ValueError("an exact separability function needs c")
    parts = []
    for js, arg in ((spec, lambda x: x), (spec.swapped(), lambda x: 1.0 / x)):
        res = integrate_1d(
            lambda x, js=js, arg=arg: np.asarray(S(arg(x)), dtype=float) * marginal_jacobian(x, js, rel_tol * 0.01),
            0.0, 1.0, rel_tol, abs_tol=0.0, endpoint_sqrt="left",
        )
        parts.append(res.value)
    v = parts[0] + parts[1]
    vt = c * jint
    return VolumeResult(v, vt, v / vt)


def estimate_prob(
    spec: ScenarioSpec | str,
    variable: str,
    n_samples: int,
    seed: int = 0,
    *,
    points: int = 20,
    shards: int = 1,
    workers: int = 1,
    qmc: bool = False,
    target: float | None = None,
    target_expr: str | None = None,
    chunk: int = 1 << 16,
) -> tuple[ProbabilityEstimate, SepFunctionTable]:
    """Scenario probability from Monte Carlo ``S`` on the ``2 * points`` assembly nodes.

    Each node gets ``n_samples`` draws (shared between nodes), and the
    probability is the ratio of the weighted PPT and feasible counts.
    """
    if isinstance(spec, str):
        spec = ScenarioSpec.from_id(spec)
    nodes, w = assembly_nodes(scenario_jacobian(spec, variable), points)
    table = estimate_sepfunc(spec, nodes, n_samples, seed, variable=variable, shards=shards,
                             workers=workers, qmc=qmc, weights=w, chunk=chunk)
    p, se = _ratio_from_moments(table.moments)
    return ProbabilityEstimate(p, se, int(n_samples), target, target_expr), table


# --- direct HS sampling ----------------------------------------------------------

def _direct_job(args) -> int:
    n, fld, split, count, seed, shard, chunk, eps = args
    rng = RngStream(seed, shard)
    hits = 0
    left = count
    while left > 0:
        m = min(chunk, left)
        rhos = ginibre_states(n, fld, rng, m)
        hits += int(ppt_mask_dense(rhos, split, eps).sum())
        left -= m
    return hits


def estimate_prob_direct(
    n: int,
    fld: NumberField,
    split: SystemSplit,
    N: int,
    seed: int = 0,
    *,
    shards: int = 1,
    workers: int = 1,
    chunk: int = 1 << 15,
    target: float | None = None,
    target_expr: str | None = None,
    eps: float = 1e-10,
) -> ProbabilityEstimate:
    """Fraction of HS-random states that are PPT, with its binomial error."""
    N = int(N)
    if N < 1000:
        raise ValueError("use at least 1000 samples")
    if split.n != n:
        raise ValueError("dimension does not match the split")
    base, extra = divmod(N, shards)
    jobs = [(n, fld, split, base + (j < extra), int(seed), j, chunk, eps) for j in range(shards)]
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_direct_job, jobs))
    else:
        hits = sum(_direct_job(j) for j in jobs)
    p = hits / N
    return ProbabilityEstimate(p, math.sqrt(p * (1.0 - p) / N), N, target, target_expr)


# --- whole-scenario sampling ---------------------------------------------------------

def _scenario_job(args) -> tuple[int, int]:
    spec, count, seed, shard, chunk, eps = args
    rng = RngStream(seed, shard)
    alphas = dirichlet_alphas(spec)
    n = spec.split.n
    cplx = any(f is NumberField.COMPLEX for _, f in spec.active)
    feas_total = ppt_total = 0
    left = count
    while left > 0:
        m = min(chunk, left)
        z = sample_z_box(spec, rng, m)
        diag = rng.generator.dirichlet(alphas, size=m)
        corr = np.zeros((m, n, n), dtype=complex if cplx else float)
        corr[:, np.arange(n), np.arange(n)] = 1.0
        for k, (i, j) in enumerate(spec.pairs):
            v = z[:, k, 0] + 1j * z[:, k, 1] if cplx else z[:, k, 0]
            corr[:, i - 1, j - 1] = v
            corr[:, j - 1, i - 1] = np.conj(v)
        feas = psd_mask(corr, eps)
        d = np.sqrt(diag[feas])
        rhos = corr[feas] * d[:, :, None] * d[:, None, :]
        feas_total += int(feas.sum())
        ppt_total += int(ppt_mask_dense(rhos, spec.split, eps).sum())
        left -= m
    return feas_total, ppt_total


def estimate_prob_scenario(
    spec: ScenarioSpec | str,
    N: int,
    seed: int = 0,
    *,
    shards: int = 1,
    chunk: int = 1 << 15,
    target: float | None = None,
    target_expr: str | None = None,
    eps: float = 1e-10,
) -> ProbabilityEstimate:
    """PPT fraction over a whole scenario, sampled without any grid or jacobian.

    The diagonal is drawn from its Dirichlet weight, the z-vector uniformly
    from the box; infeasible draws are discarded. Dense matrices are used
    throughout, so this is an independent check of the assembled results.
    Quaternionic pairs are not supported.
    """
    if isinstance(spec, str):
        spec = ScenarioSpec.from_id(spec)
    if any(f is NumberField.QUATERNION for _, f in spec.active):
        raise ValueError("quaternionic scenarios are not supported by the dense sampler")
    N = int(N)
    base, extra = divmod(N, shards)
    results = [_scenario_job((spec, base + (j < extra), int(seed), j, chunk, eps)) for j in range(shards)]
    feas = sum(r[0] for r in results)
    ppt = sum(r[1] for r in results)
    if feas == 0:
        raise ValueError("no feasible draws")
    p = ppt / feas
    return ProbabilityEstimate(p, math.sqrt(p * (1.0 - p) / feas), feas, target, target_expr)


# --- minor relaxations -------------------------------------------------------------

def upper_bound_minor_relaxation(
    which: str,
    N: int,
    seed: int = 0,
    *,
    grid: Sequence[float] | None = None,
    shards: int = 1,
    workers: int = 1,
    points: int = 20,
) -> tuple[ProbabilityEstimate, SepFunctionTable]:
    """Replace the PPT test of the full real two-qubit scenario by 2x2 minors.

    ``which`` is ``"z14"`` (``1 - nu z14^2 >= 0``), ``"z23"``
    (``nu - z23^2 >= 0``) or ``"combined"``. Returns the bound on the
    separability probability, assembled on Gauss nodes, and the table of
    ``S_approx`` at ``grid`` (measured in the unit-box convention).
    """
    if which not in ("z14", "z23", "combined"):
        raise ValueError("which must be z14, z23 or combined")
    spec = ScenarioSpec.full(SystemSplit.TWO_QUBIT, NumberField.REAL)
    jspec = JacobianSpec(1)
    nodes, w = assembly_nodes(jspec, points)
    assembled = estimate_sepfunc(spec, nodes, N, seed, variable="nu", shards=shards,
                                 workers=workers, weights=w, condition=which)
    p, se = _ratio_from_moments(assembled.moments)
    table = assembled
    if grid is not None:
        table = estimate_sepfunc(spec, grid, N, seed + 1, variable="nu", shards=shards,
                                 workers=workers, condition=which)
    return ProbabilityEstimate(p, se, int(N)), table


# --- fits ------------------------------------------------------------------------

def _eta(table: SepFunctionTable) -> np.ndarray:
    g = np.asarray(table.grid, dtype=float)
    if g.ndim != 2 or g.shape[1] < 2:
        raise ValueError("need a table over (nu1, nu2) pairs")
    return g[:, 0] * g[:, 1]


def fit_exponent(table: SepFunctionTable, bounds=(0.0, 3.0), max_eta: float = 1.0) -> tuple[float, float]:
    """Least-squares exponent ``x`` in ``S(nu1, nu2) ~ (nu1 nu2)**x``.

    Values are normalised by the point with ``nu1 = nu2 = 1`` and only
    points with ``nu1 nu2 <= max_eta`` enter the fit. Returns
    ``(x, sum of squared residuals)``.
    """
    eta = _eta(table)
    g = np.asarray(table.grid, dtype=float)
    unit = np.flatnonzero(np.all(np.isclose(g[:, :2], 1.0), axis=1))
    if unit.size == 0:
        raise ValueError("the grid must contain the point (1, 1)")
    vals = table.normalized
    ref = vals[unit[0]]
    if ref <= 0:
        raise ValueError("degenerate table: nothing separable at (1, 1)")
    keep = eta <= max_eta * (1.0 + 1e-12)
    y = vals[keep] / ref
    e = eta[keep]

    def loss(x):
        return float(np.sum((y - e**x) ** 2))

    res = minimize_scalar(loss, bounds=bounds, method="bounded", options={"xatol": 1e-8})
    return float(res.x), float(res.fun)


def eta_coalescence_test(table: SepFunctionTable, rel: float = 1e-9) -> float:
    """Pooled reduced chi-square of ``S`` within classes of equal ``nu1 nu2``.

    Close to 1 when ``S`` depends on the product alone; grid points must be
    independent (``common_draws=False``).
    """
    eta = _eta(table)
    vals = table.normalized
    se = table.normalized_std_err
    keys = np.round(np.log(eta) / rel) * rel
    chi2 = 0.0
    dof = 0
    for key in np.unique(keys):
        idx = np.flatnonzero(keys == key)
        if idx.size < 2:
            continue
        w = 1.0 / np.maximum(se[idx], 1e-300) ** 2
        mean = np.sum(w * vals[idx]) / np.sum(w)
        chi2 += float(np.sum(w * (vals[idx] - mean) ** 2))
        dof += idx.size - 1
    if dof == 0:
        raise ValueError("no two grid points share a value of nu1*nu2")
    return chi2 / dof
