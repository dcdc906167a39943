"""Orchestrated simulation studies with seeded, thread-invariant aggregation.

Each study cell (grid point x replicate) derives its own seed from the base
seed and the cell indices, and aggregates are reduced in fixed index order,
so results are byte-identical regardless of how many workers execute the
cells.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from .core import RadiusGrid, Seed, Trajectory, increments, normalize_by_running_std
from .exponents import (
    ball_mass_curve,
    exponent_from_ball_mass,
    lower_tail_exponent_reciprocal,
    stable_index,
)
from .ft import SubgradientOptions, estimate_gamma2
from .simulate import ProcessSpec, simulate

__all__ = ["STUDIES", "StudySpec", "CurveStats", "StudyResult", "run_study", "emit_report"]

log = logging.getLogger(__name__)

STUDIES = (
    "figure1_ordering",
    "appendix_c_curve",
    "gaussian_dimension",
    "exponent_comparison",
)

_DEFAULT_REPLICATES = {
    "figure1_ordering": 100,
    "appendix_c_curve": 100,
    "gaussian_dimension": 20,
    "exponent_comparison": 20,
}

_DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "figure1_ordering": {
        "steps": 1000,
        "dim": 2,
        "stable_alpha": 1.5,
        "rho": 1.0,
        "normalization": "full",
        "ft_iterations": 200,
        "ft_restarts": 1,
        "ft_step_scale": 5.0,
        "ft_dtype": "float32",
    },
    "appendix_c_curve": {
        "alpha_lo": 1e-2,
        "alpha_hi": 1.0,
        "alpha_points": 10,
        "beta": 3.5,
        "steps": 100,
        "rho": 0.25,
        "normalization": "full",
        "ft_iterations": 1000,
        "ft_restarts": 1,
        "ft_step_scale": 5.0,
        "ft_dtype": "float64",
    },
    "gaussian_dimension": {
        "dims": (1, 2, 3),
        "steps": 10_000,
        "mass_lo": 0.005,
        "mass_hi": 0.1,
        "level_lo": 0.002,
        "level_hi": 0.3,
        "n_radii": 48,
    },
    "exponent_comparison": {
        "stable_alphas": (1.1, 1.3, 1.5, 1.7, 1.9),
        "dim": 2,
        "steps": 2000,
        "block_size": 10,
    },
}


@dataclass(frozen=True)
class StudySpec:
    """One study configuration; ``params`` override the study defaults."""

    study: str
    replicates: int | None = None
    seed: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ValueError(f"unknown study {self.study!r}; choose from {STUDIES}")
        unknown = set(self.params) - set(_DEFAULT_PARAMS[self.study])
        if unknown:
            raise ValueError(f"unknown parameters for {self.study}: {sorted(unknown)}")
        if self.replicates is not None and self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    def resolved_replicates(self) -> int:
        return self.replicates if self.replicates is not None else _DEFAULT_REPLICATES[self.study]

    def resolved_params(self) -> dict[str, Any]:
        return {**_DEFAULT_PARAMS[self.study], **dict(self.params)}


@dataclass(frozen=True)
class CurveStats:
    mean: np.ndarray
    lo95: np.ndarray
    hi95: np.ndarray

    def __post_init__(self):
        if np.any(self.lo95 > self.mean) or np.any(self.mean > self.hi95):
            raise ValueError("confidence intervals must contain their means")


@dataclass(frozen=True)
class StudyResult:
    study: str
    spec: StudySpec
    grid: tuple
    grid_label: str
    stats: dict[str, CurveStats]
    raw: dict[str, np.ndarray]
    verdicts: dict[str, bool]
    diagnostics: dict[str, float]
    seed: int
    runtime_seconds: float


def _pairwise_sum(values: np.ndarray) -> float:
    """Deterministic pairwise reduction over replicate index order."""
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    if n == 0:
        return 0.0
    while n > 1:
        half = n // 2
        v = np.concatenate([v[:half] + v[half : 2 * half], v[2 * half : n]])
        n = v.size
    return float(v[0])


def _curve_stats(raw: np.ndarray) -> CurveStats:
    """Mean and normal-approximation 95% interval per grid point."""
    g, reps = raw.shape
    mean = np.array([_pairwise_sum(raw[i]) / reps for i in range(g)])
    if reps > 1:
        sd = np.array([np.sqrt(_pairwise_sum((raw[i] - mean[i]) ** 2) / (reps - 1)) for i in range(g)])
        half = 1.96 * sd / np.sqrt(reps)
    else:
        half = np.zeros(g)
    return CurveStats(mean, mean - half, mean + half)


def _spearman(x: np.ndarray, y: np.ndarray) -> float:
    rx = np.argsort(np.argsort(x)).astype(np.float64)
    ry = np.argsort(np.argsort(y)).astype(np.float64)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    return float((rx * ry).sum() / denom) if denom > 0 else 0.0


def _r_squared(x: np.ndarray, y: np.ndarray) -> float:
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    total = ((y - y.mean()) ** 2).sum()
    return float(1.0 - (resid**2).sum() / total) if total > 0 else 1.0


def _ft_options(params: Mapping[str, Any], seed: int) -> SubgradientOptions:
    return SubgradientOptions(
        iterations=int(params["ft_iterations"]),
        restarts=int(params["ft_restarts"]),
        step_scale=float(params["ft_step_scale"]),
        seed=seed,
        dtype=str(params["ft_dtype"]),
    )


def _normalize(trajectory, mode: str):
    """Variance normalization for the functional studies.

    ``full`` divides every point by the coordinate-wise std of the whole
    iterate set (one scale per coordinate); ``running`` uses the prefix-std
    normalization.  Full is the default: it removes the scale difference
    between processes while preserving the clustering structure the
    functional measures, which the prefix variant distorts for very heavy
    tails (see the monotonicity study).
    """
    if mode == "running":
        return normalize_by_running_std(trajectory).trajectory
    if mode != "full":
        raise ValueError(f"normalization must be 'full' or 'running', got {mode!r}")
    sd = trajectory.points.std(axis=0)
    return Trajectory(trajectory.points / np.where(sd > 0, sd, 1.0))


def _cell_figure1(arm: str, seed: Seed, params: Mapping[str, Any]) -> dict[str, float]:
    sim_seed = seed.spawn(0).base
    opt_seed = seed.spawn(1).base
    if arm == "stable":
        spec = ProcessSpec(
            "stable_levy_walk",
            dim=int(params["dim"]),
            steps=int(params["steps"]),
            seed=sim_seed,
            stable_alpha=float(params["stable_alpha"]),
        )
    else:
        spec = ProcessSpec("gaussian_walk", dim=int(params["dim"]), steps=int(params["steps"]), seed=sim_seed)
    walk = _normalize(simulate(spec), str(params["normalization"]))
    est = estimate_gamma2(walk, rho=float(params["rho"]), options=_ft_options(params, opt_seed))
    return {"gamma2": est.value}


def _cell_appendix_c(alpha: float, seed: Seed, params: Mapping[str, Any]) -> dict[str, float]:
    sim_seed = seed.spawn(0).base
    opt_seed = seed.spawn(1).base
    spec = ProcessSpec(
        "beta_prime_walk",
        dim=2,
        steps=int(params["steps"]),
        seed=sim_seed,
        bp_alpha=float(alpha),
        bp_beta=float(params["beta"]),
    )
    walk = _normalize(simulate(spec), str(params["normalization"]))
    est = estimate_gamma2(walk, rho=float(params["rho"]), options=_ft_options(params, opt_seed))
    return {"gamma2": est.value}


def _cell_gaussian_dimension(dim: int, seed: Seed, params: Mapping[str, Any]) -> dict[str, float]:
    spec = ProcessSpec("gaussian_walk", dim=int(dim), steps=int(params["steps"]), seed=seed.spawn(0).base)
    walk = simulate(spec)
    norms = increments(walk, 1).norms()
    levels = np.geomspace(float(params["level_lo"]), float(params["level_hi"]), int(params["n_radii"]))
    grid = RadiusGrid.from_quantiles(norms, levels)
    curve = ball_mass_curve(walk, (1,), grid)
    alpha = exponent_from_ball_mass(curve, window=(float(params["mass_lo"]), float(params["mass_hi"])))
    return {"alpha_hat": alpha}


def _cell_exponent_comparison(alpha_s: float, seed: Seed, params: Mapping[str, Any]) -> dict[str, float]:
    spec = ProcessSpec(
        "stable_levy_walk",
        dim=int(params["dim"]),
        steps=int(params["steps"]),
        seed=seed.spawn(0).base,
        stable_alpha=float(alpha_s),
    )
    walk = simulate(spec)
    lower = lower_tail_exponent_reciprocal(walk).alpha_survival
    stable = stable_index(increments(walk, 1).deltas.ravel(), int(params["block_size"])).alpha_hat
    return {"alpha_lower_tail": lower, "alpha_stable": stable}


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(value)
    return (value,)


def _study_plan(spec: StudySpec):
    p = spec.resolved_params()
    if spec.study == "figure1_ordering":
        return ("stable", "gaussian"), "process", _cell_figure1, p
    if spec.study == "appendix_c_curve":
        grid = tuple(np.geomspace(float(p["alpha_lo"]), float(p["alpha_hi"]), int(p["alpha_points"])))
        return grid, "bp_alpha", _cell_appendix_c, p
    if spec.study == "gaussian_dimension":
        return tuple(int(d) for d in _as_tuple(p["dims"])), "dim", _cell_gaussian_dimension, p
    grid = tuple(float(a) for a in _as_tuple(p["stable_alphas"]))
    return grid, "stable_alpha", _cell_exponent_comparison, p


def _verdicts(study: str, grid, stats: dict[str, CurveStats]):
    verdicts: dict[str, bool] = {}
    diagnostics: dict[str, float] = {}
    if study == "figure1_ordering":
        g = stats["gamma2"]
        stable, gaussian = 0, 1
        verdicts["stable_below_gaussian"] = bool(g.mean[stable] < g.mean[gaussian])
        verdicts["intervals_disjoint"] = bool(g.hi95[stable] < g.lo95[gaussian])
        diagnostics["gamma2_gap"] = float(g.mean[gaussian] - g.mean[stable])
    elif study == "appendix_c_curve":
        mean = stats["gamma2"].mean
        alphas = np.asarray(grid, dtype=np.float64)
        verdicts["strictly_increasing"] = bool(np.all(np.diff(mean) > 0))
        diagnostics["spearman"] = _spearman(alphas, mean)
        diagnostics["r2_log_alpha"] = _r_squared(np.log(alphas), mean)
        diagnostics["r2_sqrt_alpha"] = _r_squared(np.sqrt(alphas), mean)
    elif study == "gaussian_dimension":
        mean = stats["alpha_hat"].mean
        dims = np.asarray(grid, dtype=np.float64)
        errors = np.abs(mean - dims)
        verdicts["within_quarter_of_dim"] = bool(np.all(errors <= 0.25))
        diagnostics["max_abs_error"] = float(errors.max())
    else:
        lower = stats["alpha_lower_tail"].mean
        stable = stats["alpha_stable"].mean
        rho = _spearman(lower, stable)
        verdicts["rank_correlation_positive"] = bool(rho > 0)
        diagnostics["spearman"] = rho
    return verdicts, diagnostics


def run_study(spec: StudySpec, threads: int = 1) -> StudyResult:
    """Execute every (grid point, replicate) cell and aggregate.

    Cell seeds derive from (base seed, grid index, replicate index), and the
    reduction order is fixed, so the result does not depend on ``threads``.
    """
    start = time.perf_counter()
    grid, grid_label, cell_fn, params = _study_plan(spec)
    reps = spec.resolved_replicates()
    base = Seed(spec.seed)
    cells = [(gi, ri) for gi in range(len(grid)) for ri in range(reps)]

    def run_cell(cell):
        gi, ri = cell
        return cell_fn(grid[gi], base.spawn(gi, ri), params)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(run_cell, cells))
    else:
        outputs = [run_cell(c) for c in cells]

    names = sorted(outputs[0])
    raw = {name: np.empty((len(grid), reps)) for name in names}
    for (gi, ri), out in zip(cells, outputs):
        for name in names:
            raw[name][gi, ri] = out[name]
    stats = {name: _curve_stats(raw[name]) for name in names}
    verdicts, diagnostics = _verdicts(spec.study, grid, stats)
    runtime = time.perf_counter() - start
    log.info("study %s finished in %.1fs; verdicts=%s", spec.study, runtime, verdicts)
    return StudyResult(
        spec.study, spec, grid, grid_label, stats, raw, verdicts, diagnostics, spec.seed, runtime
    )


def _fmt(x) -> str:
    return x if isinstance(x, str) else f"{float(x):.17g}"


def emit_report(result: StudyResult, out_dir: str | Path) -> list[Path]:
    """Write one JSON summary plus one CSV per statistic curve.

    A single-statistic study writes ``<study>.csv``; multi-statistic studies
    write ``<study>_<stat>.csv``.  The wall-clock runtime is deliberately not
    serialized (the JSON field is null) so re-runs are byte-identical; it is
    available on the in-memory result and in the log.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {
        "study": result.study,
        "spec": {
            "study": result.spec.study,
            "replicates": result.spec.resolved_replicates(),
            "seed": result.spec.seed,
            "params": {k: _jsonable(v) for k, v in result.spec.resolved_params().items()},
        },
        "grid_label": result.grid_label,
        "grid": [_jsonable(g) for g in result.grid],
        "stats": {
            name: {
                "mean": [float(x) for x in s.mean],
                "lo95": [float(x) for x in s.lo95],
                "hi95": [float(x) for x in s.hi95],
            }
            for name, s in sorted(result.stats.items())
        },
        "verdicts": dict(sorted(result.verdicts.items())),
        "diagnostics": {k: float(v) for k, v in sorted(result.diagnostics.items())},
        "seed": result.seed,
        "runtime_seconds": None,
    }
    paths = []
    json_path = out_dir / f"{result.study}.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    paths.append(json_path)
    single = len(result.stats) == 1
    for name, s in sorted(result.stats.items()):
        csv_path = out_dir / (f"{result.study}.csv" if single else f"{result.study}_{name}.csv")
        with csv_path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["grid_value", "mean", "lo95", "hi95"])
            for g, m, lo, hi in zip(result.grid, s.mean, s.lo95, s.hi95):
                writer.writerow([_fmt(g), _fmt(m), _fmt(lo), _fmt(hi)])
        paths.append(csv_path)
    return paths


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return v
