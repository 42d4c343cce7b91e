"""Monte Carlo experiment engine: coverage, size and power tables.

Cells (variance profile x error model x block length x method) are fully
determined by the master seed: cell and replicate streams are derived by
hashing coordinates, so any worker count or evaluation order yields the
same table.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import inference
from .changepoint import classical_statistic, classical_test, sn_statistic, sn_test
from .rng import derive_seed
from .simgen import ErrorModel, SigmaProfile, SimModel, generate

COVERAGE_METHODS = ("sn", "wb", "st", "bb", "sbb")
TEST_METHODS = ("sn", "t1", "t2")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative Monte Carlo configuration.

    level is the confidence level for coverage runs and the significance
    level for size/power runs. lambda_grid and calibration_reps apply to
    power runs only; the mean shift enters after index change_at.
    """

    kind: str  # "coverage", "size", "power"
    n: int = 120
    sigma_profiles: tuple = ("A1",)
    error_models: tuple = (ErrorModel("b1", theta=0.0),)
    k_values: tuple = (10,)
    methods: tuple = ()
    replications: int = 500
    bootstrap_samples: int = 500
    level: float = 0.95
    lambda_grid: tuple = ()
    calibration_reps: int = 2000
    change_at: int = 40
    trim: float = 0.1
    master_seed: int = 0

    def __post_init__(self):
        if self.replications < 1 or self.bootstrap_samples < 1:
            raise ValueError("replications and bootstrap_samples must be >= 1")
        if self.kind == "power":
            if not self.lambda_grid or 0.0 not in self.lambda_grid:
                raise ValueError("power runs need a lambda grid including 0")
            if self.calibration_reps < 1:
                raise ValueError("calibration_reps must be >= 1")
        if self.kind == "coverage":
            bad = set(m.lower() for m in self.methods) - set(COVERAGE_METHODS)
        else:
            bad = set(m.lower() for m in self.methods) - set(TEST_METHODS)
        if bad:
            raise ValueError(f"unknown methods for kind={self.kind!r}: {sorted(bad)}")

    def resolved_methods(self) -> tuple:
        if self.methods:
            return tuple(m.lower() for m in self.methods)
        return COVERAGE_METHODS if self.kind == "coverage" else TEST_METHODS


@dataclass
class ExperimentResult:
    """Rates per cell with binomial Monte Carlo standard errors."""

    kind: str
    cells: dict
    spec: ExperimentSpec
    wall_time: float = 0.0
    master_seed: int = 0

    def rate(self, *key) -> float:
        return self.cells[key]["rate"]

    def to_rows(self) -> list[dict]:
        rows = []
        for key, cell in sorted(self.cells.items()):
            row = {
                "profile": key[0],
                "error": key[1],
                "k_n": key[2],
                "method": key[3],
            }
            if len(key) > 4:
                row["lambda"] = key[4]
            row.update(rate=cell["rate"], se=cell["se"])
            rows.append(row)
        return rows

    def to_table(self) -> str:
        """Pivoted text table, one line per (profile, error, k[, lambda])."""
        methods = self.spec.resolved_methods()
        groups: dict[tuple, dict] = {}
        for key, cell in self.cells.items():
            groups.setdefault(key[:3] + key[4:], {})[key[3]] = cell["rate"]
        header = ["profile", "error", "k_n"]
        if self.kind == "power":
            header.append("lambda")
        lines = ["\t".join(header + list(methods))]
        for gk in sorted(groups):
            vals = [f"{100 * groups[gk].get(m, float('nan')):.1f}" for m in methods]
            lines.append("\t".join(str(v) for v in gk) + "\t" + "\t".join(vals))
        return "\n".join(lines)


def _binomial_cell(hits: int, total: int) -> dict:
    rate = hits / total
    return {"rate": rate, "se": float(np.sqrt(rate * (1.0 - rate) / total))}


def _null_model(spec: ExperimentSpec, profile: str, error: ErrorModel, seed: int):
    return SimModel(
        n=spec.n, sigma=SigmaProfile(profile, spec.n), error=error, seed=seed
    )


def _coverage_cell(spec: ExperimentSpec, profile: str, error: ErrorModel, k: int):
    methods = spec.resolved_methods()
    alpha = 1.0 - spec.level
    B = spec.bootstrap_samples
    hits = {m: 0 for m in methods}
    for r in range(spec.replications):
        rep_seed = derive_seed(spec.master_seed, "coverage", profile, error.label(), k, r)
        x = generate(_null_model(spec, profile, error, rep_seed))
        for m in methods:
            boot_seed = derive_seed(rep_seed, "boot", m)
            if m == "sn":
                ci = inference.sn_ci(x, alpha, k)
            elif m == "wb":
                ci = inference.wb_ci(x, alpha, k, B=B, seed=boot_seed)
            elif m == "st":
                ci = inference.st_ci(x, alpha, k)
            elif m == "bb":
                ci = inference.bb_ci(x, alpha, k, B=B, studentized=False, seed=boot_seed)
            else:
                ci = inference.bb_ci(x, alpha, k, B=B, studentized=True, seed=boot_seed)
            hits[m] += ci.covers(0.0)
    return {
        (profile, error.label(), k, m): _binomial_cell(hits[m], spec.replications)
        for m in methods
    }


def _size_cell(spec: ExperimentSpec, profile: str, error: ErrorModel, k: int):
    methods = spec.resolved_methods()
    alpha = spec.level if spec.level < 0.5 else 1.0 - spec.level
    B = spec.bootstrap_samples
    hits = {m: 0 for m in methods}
    for r in range(spec.replications):
        rep_seed = derive_seed(spec.master_seed, "size", profile, error.label(), k, r)
        x = generate(_null_model(spec, profile, error, rep_seed))
        for m in methods:
            boot_seed = derive_seed(rep_seed, "boot", m)
            if m == "sn":
                rep = sn_test(x, c=spec.trim, k_n=k, B=B, seed=boot_seed)
            else:
                rep = classical_test(
                    x, c=spec.trim, k_n=k, B=B, variant=m, seed=boot_seed
                )
            hits[m] += rep.p_value <= alpha
    return {
        (profile, error.label(), k, m): _binomial_cell(hits[m], spec.replications)
        for m in methods
    }


def _statistics(x, spec: ExperimentSpec, k: int, methods) -> dict:
    out = {}
    for m in methods:
        if m == "sn":
            out[m] = sn_statistic(x, spec.trim, k)[0]
        else:
            out[m] = classical_statistic(x, spec.trim, k, m)
    return out


def _power_cell(spec: ExperimentSpec, profile: str, error: ErrorModel, k: int):
    methods = spec.resolved_methods()
    alpha = spec.level if spec.level < 0.5 else 1.0 - spec.level

    # Phase 1: critical values with exact empirical size, from null draws.
    calib = {m: np.empty(spec.calibration_reps) for m in methods}
    for r in range(spec.calibration_reps):
        seed = derive_seed(spec.master_seed, "power-calib", profile, error.label(), k, r)
        x = generate(_null_model(spec, profile, error, seed))
        for m, v in _statistics(x, spec, k, methods).items():
            calib[m][r] = v
    crit = {m: float(np.quantile(calib[m], 1.0 - alpha)) for m in methods}

    # Phase 2: rejection rates on a shared noise path per replicate, so
    # the only difference across lambda is the mean shift itself.
    cells = {}
    hits = {(m, lam): 0 for m in methods for lam in spec.lambda_grid}
    for r in range(spec.replications):
        seed = derive_seed(spec.master_seed, "power", profile, error.label(), k, r)
        base = generate(_null_model(spec, profile, error, seed))
        for lam in spec.lambda_grid:
            x = base.copy()
            x[spec.change_at :] += lam
            for m, v in _statistics(x, spec, k, methods).items():
                hits[(m, lam)] += v > crit[m]
    for m in methods:
        for lam in spec.lambda_grid:
            cells[(profile, error.label(), k, m, lam)] = _binomial_cell(
                hits[(m, lam)], spec.replications
            )
    return cells


_CELL_RUNNERS = {"coverage": _coverage_cell, "size": _size_cell, "power": _power_cell}


def _run_cell(args):
    spec, profile, error, k = args
    if spec.n < 2 * k:
        raise ValueError(f"infeasible cell: n={spec.n} with block length k={k}")
    return _CELL_RUNNERS[spec.kind](spec, profile, error, k)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Evaluate every cell of the spec; deterministic for any worker count."""
    if spec.kind not in _CELL_RUNNERS:
        raise ValueError(f"unknown experiment kind: {spec.kind!r}")
    t0 = time.perf_counter()
    tasks = [
        (spec, profile, error, k)
        for profile in spec.sigma_profiles
        for error in spec.error_models
        for k in spec.k_values
    ]
    cells: dict = {}
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_cell, tasks):
                cells.update(part)
    else:
        for task in tasks:
            cells.update(_run_cell(task))
    return ExperimentResult(
        kind=spec.kind,
        cells=cells,
        spec=spec,
        wall_time=time.perf_counter() - t0,
        master_seed=spec.master_seed,
    )


def run_coverage(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    if spec.kind != "coverage":
        raise ValueError("spec.kind must be 'coverage'")
    return run_experiment(spec, workers)


def run_size(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    if spec.kind != "size":
        raise ValueError("spec.kind must be 'size'")
    return run_experiment(spec, workers)


def run_power(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    if spec.kind != "power":
        raise ValueError("spec.kind must be 'power'")
    return run_experiment(spec, workers)
