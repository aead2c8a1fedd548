"""Command-line entry point: ``bloore <command> [options]``.

Commands
--------
verify-scenario   Monte Carlo S, c and P for a catalogued scenario
integrals         jacobian integrals and total volumes by quadrature
conjectures       direct HS sampling against the conjectured probabilities
sepfunc           full-scenario separability functions and ansatz fits
export-catalog    dump the registry as JSON

Every command writes a JSON report (``--out PREFIX`` gives ``PREFIX.json``,
plus ``PREFIX.csv`` for S-tables) and exits 0 if all items pass, 1 if any
fails and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy

from . import __version__, catalog
from .catalog import evaluate
from .estimators import (
    SepFunctionTable,
    estimate_prob,
    estimate_prob_direct,
    estimate_sepfunc,
    eta_coalescence_test,
    fit_exponent,
    upper_bound_minor_relaxation,
)
from .jacobians import JacobianSpec, ansatz_integral, jac_integral_quadrature, total_volume
from .specialfns import dyson_ansatz
from .statespace import NumberField, ScenarioSpec, SystemSplit

__all__ = ["RunConfig", "RunReport", "main", "table_to_csv", "table_from_csv", "parse_grid"]

CSV_HEADER = ["grid_var", "nu1", "nu2", "estimate", "std_err", "n_total", "n_feasible", "n_ppt"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    id: str | None = None
    system: str | None = None
    field: str | None = None
    samples: int = 1_000_000
    seed: int = 0
    shards: int = 1
    grid: str | None = None
    qmc: bool = False
    out: str | None = None
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ConfigError("--samples must be at least 1")
        if self.shards < 1:
            raise ConfigError("--shards must be at least 1")
        if self.grid is not None:
            parse_grid(self.grid)


@dataclass
class Result:
    name: str
    estimate: float
    std_err: float | None
    target_exact: str | None
    target_value: float | None
    z_score: float | None
    passed: bool | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "estimate": self.estimate,
            "std_err": self.std_err,
            "target_exact": self.target_exact,
            "target_value": self.target_value,
            "z_score": self.z_score,
            "pass": self.passed,
        }
        d.update(self.extra)
        return d


@dataclass
class RunReport:
    config: RunConfig
    results: list[Result] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    table: SepFunctionTable | None = None

    @property
    def ok(self) -> bool:
        return all(r.passed is not False for r in self.results)

    def to_dict(self) -> dict:
        return {"config": asdict(self.config), "results": [r.to_dict() for r in self.results], "meta": self.meta}


# --- small helpers --------------------------------------------------------------------

def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _count(text: str) -> int:
    v = _number(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not a whole number: {text!r}")
    return int(v)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:points`` as a geometric grid of positive values."""
    try:
        lo, hi, pts = text.split(":")
        lo, hi, n = float(lo), float(hi), int(float(pts))
    except ValueError as exc:
        raise ConfigError(f"grid must look like lo:hi:points, got {text!r}") from exc
    if lo <= 0 or hi <= 0 or n < 1 or (n > 1 and hi <= lo):
        raise ConfigError("grid bounds must be positive with lo < hi")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([lo])


def _mc_result(name, est, se, expr, extra=None) -> Result:
    target = float(evaluate(expr)) if expr is not None else None
    z = None
    passed = None
    if target is not None:
        z = (est - target) / se if se > 0 else (0.0 if est == target else math.inf)
        passed = bool(abs(z) <= 3.0)
        z = float(z)
    return Result(name, float(est), float(se), expr, target, z, passed, extra or {})


def _quad_result(name, value, expr, tol) -> Result:
    target = float(evaluate(expr))
    rel = abs(value - target) / abs(target)
    return Result(name, float(value), None, expr, target, None, bool(rel <= tol), {"rel_error": float(rel)})


# --- CSV ------------------------------------------------------------------------------

def table_to_csv(table: SepFunctionTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    first, second = table.ratio_columns()
    for k in range(len(first)):
        w.writerow([
            table.variable,
            repr(float(first[k])),
            "" if second is None else repr(float(second[k])),
            repr(float(table.estimate[k])),
            repr(float(table.std_err[k])),
            int(table.n_total[k]),
            int(table.n_feasible[k]),
            int(table.n_ppt[k]),
        ])
    return buf.getvalue()


def table_from_csv(text: str, scenario: str = "", measure: float | None = None) -> SepFunctionTable:
    """Inverse of :func:`table_to_csv`; ``measure`` is recovered from the rows if omitted."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or list(rows[0].keys()) != CSV_HEADER:
        raise ValueError("not an S-table CSV")
    first = np.array([float(r["nu1"]) for r in rows])
    has_second = rows[0]["nu2"] != ""
    grid = np.column_stack([first, [float(r["nu2"]) for r in rows]]) if has_second else first
    n_total = np.array([int(r["n_total"]) for r in rows])
    n_feas = np.array([int(r["n_feasible"]) for r in rows])
    n_ppt = np.array([int(r["n_ppt"]) for r in rows])
    if measure is None:
        k = int(np.argmax(n_ppt))
        measure = float(rows[k]["estimate"]) * n_total[k] / n_ppt[k] if n_ppt[k] else 1.0
    return SepFunctionTable(scenario, rows[0]["grid_var"], grid, n_total, n_feas, n_ppt, measure)


# --- commands ---------------------------------------------------------------------------

def cmd_verify_scenario(cfg: RunConfig) -> RunReport:
    if not cfg.id:
        raise ConfigError("verify-scenario needs --id")
    try:
        rec = catalog.lookup(cfg.id)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    report = RunReport(cfg)
    spec = rec.spec
    var = rec.variable or spec.split.ratio_names[0]
    grid = parse_grid(cfg.grid) if cfg.grid else np.geomspace(0.1, 10.0, 9)
    if not rec.factors:
        table = estimate_sepfunc(spec, grid, cfg.samples, cfg.seed, variable=var,
                                 shards=cfg.shards, qmc=cfg.qmc)
        report.table = table
        # Feasibility does not depend on the grid point and the draws are shared.
        q = int(table.n_feasible[0]) / int(table.n_total[0])
        c_hat = table.measure * q
        c_se = table.measure * math.sqrt(q * (1.0 - q) / int(table.n_total[0]))
        report.results.append(_mc_result("c", c_hat, c_se, rec.c))
        if rec.has_function:
            exact = np.atleast_1d(rec.S(grid))
            for g, est, se, ex in zip(grid, table.estimate, table.std_err, exact):
                z = (est - ex) / se if se > 0 else (0.0 if abs(est - ex) < 1e-12 else math.inf)
                report.results.append(Result(f"S({var}={g:.6g})", float(est), float(se), None,
                                             float(ex), float(z), bool(abs(z) <= 3.0)))
    if rec.p is not None or rec.p_derived is not None:
        if rec.factors:
            parts = [estimate_prob(fid, fvar, cfg.samples, cfg.seed + k, shards=cfg.shards, qmc=cfg.qmc)[0]
                     for k, (fid, fvar) in enumerate(rec.factors)]
            p = math.prod(e.p_hat for e in parts)
            se = p * math.sqrt(sum((e.std_err / e.p_hat) ** 2 for e in parts))
        elif rec.has_function:
            est, _ = estimate_prob(spec, var, cfg.samples, cfg.seed, shards=cfg.shards, qmc=cfg.qmc)
            p, se = est.p_hat, est.std_err
        else:
            p = None
        if p is not None:
            if rec.p is not None:
                report.results.append(_mc_result("P", p, se, rec.p))
            if rec.p_derived is not None:
                report.results.append(_mc_result("P (derived)", p, se, rec.p_derived))
    report.meta["flags"] = sorted(rec.flags)
    return report


_INTEGRALS = [
    ("int J_real", lambda: sum(jac_integral_quadrature(JacobianSpec(1))), "pi**2/1146880"),
    ("int J_complex", lambda: sum(jac_integral_quadrature(JacobianSpec(2))), "1/1009008000"),
    ("ansatz integral real", lambda: ansatz_integral(1), "1/151200"),
    ("ansatz integral complex", lambda: ansatz_integral(2), "71/99891792000"),
    ("ansatz integral quaternionic", lambda: ansatz_integral(4), "5989/358347086242825680000"),
    ("total volume real", lambda: total_volume(1), "pi**4/60480"),
    ("total volume complex", lambda: total_volume(2), "pi**6/851350500"),
]


def cmd_integrals(cfg: RunConfig) -> RunReport:
    report = RunReport(cfg)
    for name, fn, expr in _INTEGRALS:
        report.results.append(_quad_result(name, fn(), expr, cfg.tol))
    return report


_DIRECT = [
    (4, "real", "2x2", "real two-qubit"),
    (4, "complex", "2x2", "complex two-qubit"),
    (6, "real", "2x3", "real qubit-qutrit"),
    (6, "complex", "2x3", "complex qubit-qutrit"),
]


def cmd_conjectures(cfg: RunConfig) -> RunReport:
    report = RunReport(cfg)
    conj = {c.name: c for c in catalog.conjectures()}
    for n, fld, split, name in _DIRECT:
        if cfg.system and cfg.system != split:
            continue
        if cfg.field and cfg.field != fld:
            continue
        est = estimate_prob_direct(n, NumberField.parse(fld), SystemSplit.parse(split), cfg.samples,
                                   cfg.seed, shards=cfg.shards)
        report.results.append(_mc_result(f"P_sep {name}", est.p_hat, est.std_err, conj[name].p))
    if not cfg.system and not cfg.field:
        for which, expr in (("z14", "1/2 + 512/(135*pi**2)"), ("combined", "1024/(135*pi**2)")):
            est, _ = upper_bound_minor_relaxation(which, min(cfg.samples, 10**6), cfg.seed, shards=cfg.shards)
            target = float(evaluate(expr))
            rel = abs(est.p_hat - target) / target
            report.results.append(Result(f"minor bound {which}", est.p_hat, est.std_err, expr, target,
                                         (est.p_hat - target) / est.std_err, bool(rel <= 0.01),
                                         {"rel_error": rel}))
    return report


def cmd_sepfunc(cfg: RunConfig) -> RunReport:
    system = cfg.system or "2x2"
    fld = cfg.field or "complex"
    if system not in ("2x2", "2x3") or fld not in ("real", "complex"):
        raise ConfigError("sepfunc covers 2x2 and 2x3 over real or complex numbers")
    spec = ScenarioSpec.full(SystemSplit.parse(system), NumberField.parse(fld))
    report = RunReport(cfg)
    beta = 1 if fld == "real" else 2
    if system == "2x2":
        grid = parse_grid(cfg.grid) if cfg.grid else np.geomspace(0.05, 1.0, 12)
        grid = np.unique(np.append(grid, 1.0))
        table = estimate_sepfunc(spec, grid, cfg.samples, cfg.seed, sampler="correlation",
                                 shards=cfg.shards, qmc=cfg.qmc)
        report.table = table
        norm = table.normalized / table.normalized[np.flatnonzero(grid == 1.0)[0]]
        sel = (grid >= 0.05) & (grid <= 1.0)
        dev = float(np.max(np.abs(norm[sel] - dyson_ansatz(grid[sel], beta))))
        report.results.append(Result("sup deviation from Dyson ansatz", dev, None, None, None, None,
                                     bool(dev <= 0.02), {"grid": grid.tolist(), "normalized": norm.tolist()}))
    else:
        vals = parse_grid(cfg.grid) if cfg.grid else np.geomspace(0.125, 1.0, 4)
        pairs = np.array([(a, b) for a in vals for b in vals])
        table = estimate_sepfunc(spec, pairs, cfg.samples, cfg.seed, variable="nu1,nu2",
                                 sampler="correlation", shards=cfg.shards, qmc=cfg.qmc,
                                 common_draws=False)
        report.table = table
        x, ssr = fit_exponent(table)
        chi2 = eta_coalescence_test(table)
        expected = 0.5 if beta == 1 else 1.0
        report.results.append(Result("eta exponent fit", x, None, str(expected), expected, None,
                                     None, {"ssr": ssr}))
        report.results.append(Result("eta coalescence reduced chi2", chi2, None, None, None, None, None))
    return report


def cmd_export_catalog(cfg: RunConfig) -> RunReport:
    report = RunReport(cfg)
    text = catalog.export_json()
    report.meta["catalog"] = json.loads(text)
    report.meta["records"] = len(catalog.records())
    return report


COMMANDS = {
    "verify-scenario": cmd_verify_scenario,
    "integrals": cmd_integrals,
    "conjectures": cmd_conjectures,
    "sepfunc": cmd_sepfunc,
    "export-catalog": cmd_export_catalog,
}


# --- argument handling ---------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bloore", description="Separability functions and HS probabilities.")
    p.add_argument("--version", action="version", version=f"bloore {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="flat key=value file; command-line flags take precedence")
        s.add_argument("--id")
        s.add_argument("--system", choices=["2x2", "2x3", "3x3", "4x2", "2x2x2"])
        s.add_argument("--field", choices=["real", "complex", "quaternion"])
        s.add_argument("--samples", type=_count)
        s.add_argument("--seed", type=_count)
        s.add_argument("--shards", type=_count)
        s.add_argument("--grid")
        s.add_argument("--qmc", action="store_true", default=None)
        s.add_argument("--out")
        s.add_argument("--tol", type=_number)
    return p


_CASTS = {"samples": _count, "seed": _count, "shards": _count, "tol": _number,
          "qmc": lambda v: v.strip().lower() in ("1", "true", "yes", "on")}


def read_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in RunConfig.__dataclass_fields__ or key == "command":
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CASTS.get(key, str)(value)
            except argparse.ArgumentTypeError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for key in RunConfig.__dataclass_fields__:
        if key == "command":
            continue
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(command=args.command, **values)


def _meta(report: RunReport, wall: float) -> dict:
    meta = {
        "wall_time_s": wall,
        "versions": {"bloore": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "rng": "PCG64 via SeedSequence(seed, spawn_key=(shard,))",
    }
    if report.table is not None:
        meta["sampler"] = report.table.meta
    meta.update(report.meta)
    return meta


def run(cfg: RunConfig) -> RunReport:
    t0 = time.perf_counter()
    report = COMMANDS[cfg.command](cfg)
    report.meta = _meta(report, time.perf_counter() - t0)
    return report


def _emit(report: RunReport, out: str | None) -> None:
    text = json.dumps(report.to_dict(), indent=2, allow_nan=True)
    if out is None:
        print(text)
        if report.table is not None:
            print(table_to_csv(report.table), end="")
        return
    with open(out + ".json", "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    if report.table is not None:
        with open(out + ".csv", "w", encoding="utf-8") as fh:
            fh.write(table_to_csv(report.table))
    for r in report.results:
        mark = {True: "PASS", False: "FAIL", None: "INFO"}[r.passed]
        print(f"{mark}  {r.name}: {r.estimate:.8g}" + (f" (target {r.target_exact})" if r.target_exact else ""))


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = build_config(args)
        report = run(cfg)
        _emit(report, cfg.out)
    except (ConfigError, OSError) as exc:
        print(f"bloore: error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
