"""Command-line interface tying simulation, estimation and studies together.

Every subcommand prints a JSON report (with the fully resolved configuration
and seed embedded) to stdout and optionally writes files under ``--out-dir``.
Exit codes: 0 success, 1 data/convergence error, 2 argument error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import core, exponents, ft, spatial
from .errors import DataError
from .experiments import STUDIES, StudySpec, emit_report, run_study
from .simulate import PROCESS_KINDS, ProcessSpec, simulate

log = logging.getLogger("trajtail")

_KIND_ALIASES = {k.replace("_", "-"): k for k in PROCESS_KINDS}
_STUDY_ALIASES = {s.replace("_", "-"): s for s in STUDIES}


def _jsonable(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _print_report(report: dict) -> None:
    sys.stdout.write(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")


def _write_report(report: dict, args, name: str) -> None:
    if args.out_dir is not None:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _common_flags(sub: argparse.ArgumentParser, needs_input: bool = False) -> None:
    if needs_input:
        sub.add_argument("--input", required=True, help="trajectory CSV (one iterate per row)")
        sub.add_argument("--has-header", action="store_true", help="skip a single header row")
    sub.add_argument("--out-dir", default=None, help="directory for JSON/CSV outputs")
    sub.add_argument("--config", default=None, help="key = value file merged under explicit flags")
    sub.add_argument("--threads", type=int, default=1, help="worker cap for parallel sections")
    sub.add_argument("--verbose", action="store_true", help="log progress to stderr")


def _quantile_grid(values: np.ndarray, lo: float, hi: float, num: int) -> core.RadiusGrid:
    return core.RadiusGrid.from_quantiles(values, np.geomspace(lo, hi, num))


def _resolve_radii(args, values: np.ndarray) -> core.RadiusGrid:
    if args.radii_min is not None and args.radii_max is not None:
        return core.RadiusGrid.geometric(args.radii_min, args.radii_max, args.radii_num)
    return _quantile_grid(values, args.level_lo, args.level_hi, args.radii_num)


def cmd_simulate(args) -> dict:
    kind = _KIND_ALIASES.get(args.kind, args.kind)
    spec = ProcessSpec(
        kind=kind,
        dim=args.dim,
        steps=args.steps,
        seed=args.seed,
        sigma=args.sigma if len(args.sigma) > 1 else args.sigma[0],
        stable_alpha=args.stable_alpha,
        bp_alpha=args.bp_alpha,
        bp_beta=args.bp_beta,
        gd_step=args.gd_step,
        curvature=args.curvature if len(args.curvature) > 1 else args.curvature[0],
    )
    trajectory = simulate(spec)
    core.save_trajectory(trajectory, args.out)
    return {
        "command": "simulate",
        "config": {
            "kind": kind,
            "dim": args.dim,
            "steps": args.steps,
            "seed": args.seed,
            "sigma": list(args.sigma),
            "stable_alpha": args.stable_alpha,
            "bp_alpha": args.bp_alpha,
            "bp_beta": args.bp_beta,
            "gd_step": args.gd_step,
            "curvature": list(args.curvature),
        },
        "out": str(args.out),
        "n_points": len(trajectory),
        "dim": trajectory.dim,
        "seed": args.seed,
    }


def _ft_options(args) -> ft.SubgradientOptions:
    return ft.SubgradientOptions(
        iterations=args.iterations,
        restarts=args.restarts,
        step_scale=args.step_scale,
        seed=args.seed,
        dtype=args.ft_dtype,
    )


def cmd_gamma2(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    rho = ft.resolve_rho(args.rho, args.loss_bound, args.lipschitz)
    est = ft.estimate_gamma2(trajectory, rho, options=_ft_options(args))
    return {
        "command": "gamma2",
        "gamma2": est.value,
        "weights": list(est.weights.weights),
        "method": est.method,
        "n": len(trajectory),
        "rho": rho,
        "seed": args.seed,
        "config": {
            "input": str(args.input),
            "rho": rho,
            "iterations": args.iterations,
            "restarts": args.restarts,
            "step_scale": args.step_scale,
            "ft_dtype": args.ft_dtype,
            "seed": args.seed,
        },
    }


def _tail_fit_dict(fit: exponents.TailFitResult) -> dict:
    return {
        "alpha_survival": fit.alpha_survival,
        "alpha_density": fit.alpha_density,
        "x_min": fit.x_min,
        "ks_distance": fit.ks_distance,
        "n_tail": fit.n_tail,
        "n_samples": fit.n_samples,
        "notes": list(fit.notes),
    }


def cmd_tail_fit(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    fit = exponents.lower_tail_exponent_reciprocal(trajectory, x_min=args.x_min)
    return {
        "command": "tail-fit",
        **_tail_fit_dict(fit),
        "config": {"input": str(args.input), "x_min": args.x_min},
    }


def cmd_stable_index(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    deltas = core.increments(trajectory, 1).deltas
    if args.layer_sizes is not None:
        sizes = list(args.layer_sizes)
        if sum(sizes) != trajectory.dim:
            raise ValueError(f"layer sizes {sizes} must sum to dimension {trajectory.dim}")
        blocks, start = [], 0
        for s in sizes:
            blocks.append(list(range(start, start + s)))
            start += s
        result = exponents.layerwise_stable_index(trajectory, blocks, args.block_size)
    else:
        result = exponents.stable_index(deltas.ravel(), args.block_size)
    return {
        "command": "stable-index",
        "alpha_hat": result.alpha_hat,
        "per_block": list(result.per_block),
        "block_size": result.block_size,
        "n_zero_dropped": result.n_zero_dropped,
        "config": {
            "input": str(args.input),
            "block_size": args.block_size,
            "layer_sizes": list(args.layer_sizes) if args.layer_sizes else None,
        },
    }


def _write_curve(args, name: str, xs, ys, header: tuple[str, str]) -> None:
    if args.out_dir is None:
        return
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / f"{name}.csv").open("w", newline="") as handle:
        handle.write(f"{header[0]},{header[1]}\n")
        for x, y in zip(xs, ys):
            handle.write(f"{x:.17g},{y:.17g}\n")


def cmd_ballmass(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    lags = args.lags
    norms = core.increments(trajectory, min(lags)).norms()
    grid = _resolve_radii(args, norms)
    curve = exponents.ball_mass_curve(trajectory, lags, grid, mode=args.mode)
    report: dict = {
        "command": "ballmass",
        "lags": list(lags),
        "mode": args.mode,
        "n_radii": len(grid),
        "config": {
            "input": str(args.input),
            "lags": list(lags),
            "mode": args.mode,
            "window": [args.window[0], args.window[1]],
        },
    }
    try:
        report["exponent"] = exponents.exponent_from_ball_mass(curve, window=tuple(args.window))
    except DataError as exc:
        report["exponent"] = None
        report["exponent_error"] = str(exc)
    _write_curve(args, "ballmass", grid.radii, curve.masses, ("radius", "mass"))
    return report


def cmd_kfunction(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    from scipy.spatial.distance import pdist

    dists = pdist(trajectory.points)
    grid = _resolve_radii(args, dists)
    curve = spatial.k_function(trajectory, grid)
    report: dict = {
        "command": "kfunction",
        "n": curve.n,
        "diameter": curve.diameter,
        "n_radii": len(grid),
        "config": {"input": str(args.input), "window": [args.window[0], args.window[1]]},
    }
    try:
        report["slope"] = spatial.k_function_slope(curve, window=tuple(args.window))
    except DataError as exc:
        report["slope"] = None
        report["slope_error"] = str(exc)
    _write_curve(args, "kfunction", grid.radii, curve.values, ("radius", "k_value"))
    return report


def cmd_cover(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    from scipy.spatial.distance import pdist

    dists = pdist(trajectory.points) if len(trajectory) > 1 else np.array([1.0])
    if args.radii_min is not None and args.radii_max is not None:
        grid = core.RadiusGrid.geometric(args.radii_min, args.radii_max, args.radii_num, rho=args.rho)
    else:
        levels = np.geomspace(args.level_lo, 1.0, args.radii_num)
        radii = np.unique(np.quantile(dists[dists > 0], levels)) if np.any(dists > 0) else np.array([args.rho])
        grid = core.RadiusGrid(radii, args.rho)
    profile = spatial.covering_numbers(trajectory, grid)
    _write_curve(args, "cover", grid.radii, profile.counts.astype(float), ("radius", "count"))
    return {
        "command": "cover",
        "dudley_value": profile.dudley_value,
        "rho": args.rho,
        "counts": [int(c) for c in profile.counts],
        "radii": list(grid.radii),
        "config": {"input": str(args.input), "rho": args.rho},
    }


def _load_mass_curve(path: str) -> tuple[np.ndarray, np.ndarray]:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return rows[:, 0], rows[:, 1]


def cmd_bound(args) -> dict:
    report: dict = {"command": "bound", "form": args.form}
    if args.form in ("theorem1-prob", "theorem1-exp"):
        inp = bounds_mod.BoundInputs(
            loss_bound=args.loss_bound,
            lipschitz=args.lipschitz,
            rho=args.rho,
            n=args.n,
            delta=args.delta,
            gamma2=args.gamma2,
            mutual_info_inf=args.mutual_info_inf,
            mutual_info_1=args.mutual_info_1,
            k1=args.k1,
            k2=args.k2,
            unbounded_loss_tail=args.unbounded_loss_tail,
        )
        if args.form == "theorem1-prob":
            report["value"] = bounds_mod.theorem1_high_prob_bound(inp)
            report["confidence"] = inp.confidence
        else:
            report["value"] = bounds_mod.theorem1_expectation_bound(inp)
        report["l_rho"] = inp.l_rho
        report["note"] = "up to the universal constant"
        report["config"] = {
            "loss_bound": args.loss_bound,
            "lipschitz": args.lipschitz,
            "rho": args.rho,
            "n": args.n,
            "delta": args.delta,
            "gamma2": args.gamma2,
            "mutual_info_inf": args.mutual_info_inf,
            "mutual_info_1": args.mutual_info_1,
            "k1": args.k1,
            "k2": args.k2,
        }
    elif args.form == "corollary1":
        report["value"] = bounds_mod.corollary1_bound(args.alpha, args.rho, args.c_rho)
        report["config"] = {"alpha": args.alpha, "rho": args.rho, "c_rho": args.c_rho}
    elif args.form == "kernel":
        if args.curve is None:
            raise ValueError("--curve is required for the kernel functional")
        radii, masses = _load_mass_curve(args.curve)
        curve = exponents.BallMassCurve(core.RadiusGrid(radii, max(args.rho, radii[-1])), masses, (1,))
        report["value"] = bounds_mod.kernel_functional(curve, args.rho, args.dim)
        report["config"] = {"curve": args.curve, "rho": args.rho, "dim": args.dim}
    elif args.form == "j-integral":
        report["value"] = bounds_mod.j_integral(args.a, args.horizon, args.rho, args.dim)
        report["config"] = {"a": args.a, "horizon": args.horizon, "rho": args.rho, "dim": args.dim}
    else:  # gauss-check
        check = bounds_mod.gauss_radial_bounds_check(args.a, args.r, args.rho, args.dim)
        report.update(
            {"integral": check.integral, "lower": check.lower, "upper": check.upper, "holds": check.holds}
        )
        report["config"] = {"a": args.a, "r": args.r, "rho": args.rho, "dim": args.dim}
    return report


def cmd_study(args) -> dict:
    name = _STUDY_ALIASES.get(args.name, args.name)
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ValueError(f"--param expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        params[key.strip()] = _parse_scalar(raw.strip())
    spec = StudySpec(name, replicates=args.replicates, seed=args.seed, params=params)
    result = run_study(spec, threads=args.threads)
    out_dir = Path(args.out_dir) if args.out_dir is not None else Path(".")
    paths = emit_report(result, out_dir)
    log.info("study runtime: %.1fs", result.runtime_seconds)
    return {
        "command": "study",
        "study": name,
        "files": [str(p) for p in paths],
        "verdicts": dict(sorted(result.verdicts.items())),
        "diagnostics": {k: float(v) for k, v in sorted(result.diagnostics.items())},
        "seed": args.seed,
        "config": {
            "name": name,
            "replicates": spec.resolved_replicates(),
            "seed": args.seed,
            "params": {k: _jsonable(v) for k, v in spec.resolved_params().items()},
        },
    }


def cmd_analyze(args) -> dict:
    trajectory = core.load_trajectory(args.input, args.has_header)
    if args.window > 0 and len(trajectory) > args.window + 1:
        trajectory = core.Trajectory(trajectory.points[-(args.window + 1) :])
    rho = ft.resolve_rho(args.rho)
    report: dict = {
        "command": "analyze",
        "n": len(trajectory),
        "dim": trajectory.dim,
        "rho": rho,
        "seed": args.seed,
        "config": {
            "input": str(args.input),
            "rho": rho,
            "window": args.window,
            "normalize": bool(args.normalize),
            "block_size": args.block_size,
            "mass_window": [args.mass_window[0], args.mass_window[1]],
            "iterations": args.iterations,
            "restarts": args.restarts,
            "step_scale": args.step_scale,
            "seed": args.seed,
        },
    }

    ft_input = trajectory
    if args.normalize:
        norm = core.normalize_by_running_std(trajectory)
        ft_input = norm.trajectory
        report["normalization"] = {
            "first_scaled_index": norm.first_scaled_index,
            "degenerate_axes": list(norm.degenerate_axes),
            "convention": norm.convention,
        }
    est = ft.estimate_gamma2(ft_input, rho, options=_ft_options(args))
    report["gamma2"] = est.value
    report["gamma2_method"] = est.method

    def attempt(key, fn):
        try:
            report[key] = fn()
        except DataError as exc:
            report[key] = None
            report[f"{key}_error"] = str(exc)

    attempt("reciprocal_power_law", lambda: _tail_fit_dict(exponents.lower_tail_exponent_reciprocal(trajectory)))

    norms = core.increments(trajectory, 1).norms()

    def ball_exponent():
        grid = _quantile_grid(norms, args.level_lo, args.level_hi, args.radii_num)
        curve = exponents.ball_mass_curve(trajectory, (1,), grid)
        return exponents.exponent_from_ball_mass(curve, window=tuple(args.mass_window))

    attempt("ball_mass_exponent", ball_exponent)
    attempt(
        "stable_index",
        lambda: exponents.stable_index(core.increments(trajectory, 1).deltas.ravel(), args.block_size).alpha_hat,
    )

    def k_slope():
        from scipy.spatial.distance import pdist

        dists = pdist(trajectory.points)
        grid = _quantile_grid(dists, args.level_lo, args.level_hi, args.radii_num)
        return spatial.k_function_slope(spatial.k_function(trajectory, grid))

    attempt("k_function_slope", k_slope)

    def dudley():
        from scipy.spatial.distance import pdist

        dists = pdist(ft_input.points)
        positive = dists[dists > 0]
        if positive.size == 0:
            return {"dudley_value": 0.0, "dominates": True}
        radii = np.unique(np.quantile(positive, np.geomspace(0.01, 1.0, args.radii_num)))
        profile = spatial.covering_numbers(ft_input, core.RadiusGrid(radii, rho))
        dominates = spatial.dudley_dominates(est.value, profile)
        if not dominates:
            log.warning("entropy-integral diagnostic violated: gamma2=%.4f dudley=%.4f", est.value, profile.dudley_value)
        return {"dudley_value": profile.dudley_value, "dominates": dominates}

    attempt("covering", dudley)
    return report


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _apply_config_file(parser: argparse.ArgumentParser, args: argparse.Namespace, argv: list[str]) -> argparse.Namespace:
    """Merge `key = value` lines under explicitly passed flags."""
    pairs: dict[str, str] = {}
    for line_no, line in enumerate(Path(args.config).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{args.config}: line {line_no}: expected 'key = value'")
        key, raw = stripped.split("=", 1)
        pairs[key.strip().replace("-", "_")] = raw.strip()

    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub_action.choices[args.subcommand]
    converters: dict[str, object] = {}
    boolean_flags: set[str] = set()
    for action in subparser._actions:
        if action.dest in ("help", argparse.SUPPRESS):
            continue
        converters[action.dest] = action.type
        if isinstance(action, argparse._StoreTrueAction):
            boolean_flags.add(action.dest)

    explicit = {tok.split("=", 1)[0].lstrip("-").replace("-", "_") for tok in argv if tok.startswith("--")}
    for key, raw in pairs.items():
        if key in explicit:
            continue
        if key not in converters:
            raise ValueError(f"{args.config}: unknown option {key!r}")
        if key in boolean_flags:
            value = raw.lower() in ("1", "true", "yes", "on")
        elif converters[key] is not None:
            value = converters[key](raw)
        else:
            value = raw
        setattr(args, key, value)
    return args


def _add_radii_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--radii-min", type=float, default=None)
    sub.add_argument("--radii-max", type=float, default=None)
    sub.add_argument("--radii-num", type=int, default=48)
    sub.add_argument("--level-lo", type=float, default=0.002)
    sub.add_argument("--level-hi", type=float, default=0.5)


def _add_ft_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--iterations", type=int, default=2000)
    sub.add_argument("--restarts", type=int, default=5)
    sub.add_argument("--step-scale", type=float, default=0.5)
    sub.add_argument("--ft-dtype", choices=("float64", "float32"), default="float64")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trajtail", description=__doc__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("simulate", help="generate a process trajectory")
    sub.add_argument("--kind", required=True, choices=sorted(_KIND_ALIASES) + sorted(PROCESS_KINDS))
    sub.add_argument("--dim", type=int, default=2)
    sub.add_argument("--steps", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output trajectory CSV")
    sub.add_argument("--sigma", type=_csv_floats, default=(1.0,))
    sub.add_argument("--stable-alpha", type=float, default=1.5)
    sub.add_argument("--bp-alpha", type=float, default=0.5)
    sub.add_argument("--bp-beta", type=float, default=3.5)
    sub.add_argument("--gd-step", type=float, default=0.1)
    sub.add_argument("--curvature", type=_csv_floats, default=(1.0,))
    _common_flags(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("gamma2", help="estimate the normalized functional")
    sub.add_argument("--rho", type=float, default=None)
    sub.add_argument("--loss-bound", type=float, default=None)
    sub.add_argument("--lipschitz", type=float, default=None)
    sub.add_argument("--seed", type=int, default=0)
    _add_ft_flags(sub)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_gamma2)

    sub = subs.add_parser("tail-fit", help="power-law fit of reciprocal step norms")
    sub.add_argument("--x-min", type=float, default=None)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_tail_fit)

    sub = subs.add_parser("stable-index", help="block log-moment stable index")
    sub.add_argument("--block-size", type=int, default=10)
    sub.add_argument("--layer-sizes", type=_csv_ints, default=None)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_stable_index)

    sub = subs.add_parser("ballmass", help="empirical kernel ball-mass curve")
    sub.add_argument("--lags", type=_csv_ints, default=(1,))
    sub.add_argument("--mode", choices=("average", "worst"), default="average")
    sub.add_argument("--window", type=_csv_floats, default=(0.01, 0.2))
    _add_radii_flags(sub)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_ballmass)

    sub = subs.add_parser("kfunction", help="spatial K-function curve and slope")
    sub.add_argument("--window", type=_csv_floats, default=(0.005, 0.1))
    _add_radii_flags(sub)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_kfunction)

    sub = subs.add_parser("cover", help="greedy covering numbers and entropy integral")
    sub.add_argument("--rho", type=float, default=1.0)
    _add_radii_flags(sub)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_cover)

    sub = subs.add_parser("bound", help="closed-form bound calculators")
    sub.add_argument(
        "--form",
        required=True,
        choices=("theorem1-prob", "theorem1-exp", "corollary1", "kernel", "j-integral", "gauss-check"),
    )
    sub.add_argument("--loss-bound", type=float, default=1.0)
    sub.add_argument("--lipschitz", type=float, default=1.0)
    sub.add_argument("--rho", type=float, default=1.0)
    sub.add_argument("--n", type=int, default=100)
    sub.add_argument("--delta", type=float, default=0.05)
    sub.add_argument("--gamma2", type=float, default=0.0)
    sub.add_argument("--mutual-info-inf", type=float, default=0.0)
    sub.add_argument("--mutual-info-1", type=float, default=0.0)
    sub.add_argument("--k1", type=float, default=1.0)
    sub.add_argument("--k2", type=float, default=1.0)
    sub.add_argument("--unbounded-loss-tail", type=float, default=0.0)
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--c-rho", type=float, default=1.0)
    sub.add_argument("--curve", default=None, help="CSV with radius,mass columns")
    sub.add_argument("--dim", type=int, default=2)
    sub.add_argument("--a", type=float, default=1.0)
    sub.add_argument("--horizon", type=float, default=1.0)
    sub.add_argument("--r", type=float, default=0.5)
    _common_flags(sub)
    sub.set_defaults(func=cmd_bound)

    sub = subs.add_parser("study", help="run a bundled simulation study")
    sub.add_argument("--name", required=True, choices=sorted(_STUDY_ALIASES) + sorted(STUDIES))
    sub.add_argument("--replicates", type=int, default=None)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--param", action="append", help="override a study parameter, KEY=VALUE")
    _common_flags(sub)
    sub.set_defaults(func=cmd_study)

    sub = subs.add_parser("analyze", help="bundled trajectory report")
    sub.add_argument("--rho", type=float, default=0.25)
    sub.add_argument("--window", type=int, default=200, help="trailing iterate count (0 keeps all)")
    sub.add_argument("--normalize", action="store_true")
    sub.add_argument("--block-size", type=int, default=10)
    sub.add_argument("--mass-window", type=_csv_floats, default=(0.01, 0.2))
    sub.add_argument("--seed", type=int, default=0)
    _add_ft_flags(sub)
    _add_radii_flags(sub)
    _common_flags(sub, needs_input=True)
    sub.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if getattr(args, "config", None):
            args = _apply_config_file(parser, args, argv)
        report = args.func(args)
        _write_report(report, args, report["command"])
        _print_report(report)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
