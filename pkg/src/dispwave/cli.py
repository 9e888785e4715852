"""Command-line front end: simulate, soliton, bound, sweep.

Exit-code policy: wave breaking is science, not failure, so a run that blows
up still exits 0 with the verdict recorded in its artifacts. Nonzero exits
are reserved for configuration problems, inadmissible parameters and I/O
errors. All artifacts are deterministic: the same config produces
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .blowup import (
    SweepRow,
    blowup_condition,
    existence_bound,
    extrapolate_blowup_time,
    run_member,
    write_comparison_csv,
)
from .config import (
    ConfigError,
    RunConfig,
    build_family,
    build_initial_field,
    config_dict,
    load_run_config,
    load_sweep_config,
)
from .fileio import fmt, jsonable, write_csv, write_json
from .pde import PdeParams
from .solitary import (
    AdmissibilityError,
    SolitonParams,
    build_profile,
    check_admissible,
    first_integral_residual,
    shape_error,
    write_profile_csv,
)
from .spectral import Field, Grid
from .timestep import BoundaryDecayError, SimulationResult, simulate

_GLOBAL_NOTE = "gamma = 0: all solutions are global"


def _fail(message: str, code: int = 2) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_trace(result: SimulationResult, path: Path) -> None:
    rows = [(r.t, r.energy, r.m, r.xi, r.max_u, r.dt) for r in result.samples]
    write_csv(path, ("t", "E", "m", "xi", "max_u", "dt"), rows)


def _write_checkpoints(result: SimulationResult, directory: Path) -> list[float]:
    directory.mkdir(parents=True, exist_ok=True)
    times = []
    for i, (t, field) in enumerate(result.checkpoints):
        write_csv(directory / f"checkpoint_{i:04d}.csv", ("x", "u"),
                  zip(field.grid.x, field.values))
        times.append(t)
    return times


def _summary_payload(rc: RunConfig, u0: Field, result: SimulationResult) -> dict:
    bound = existence_bound(u0, rc.params)
    payload: dict = {
        "stop_reason": result.stop_reason,
        "t_stop": result.t_stop,
        "energy_initial": result.samples[0].energy,
        "energy_final": result.samples[-1].energy,
        "energy_drift": result.energy_drift,
        "existence_bound": {
            "E0": bound.e0,
            "m0": bound.m0,
            "gamma_case": bound.gamma_case,
            "K": bound.bracket,
            "T_lower": bound.t_lower,
        },
        "warnings": list(result.warnings),
        "config": config_dict(rc),
    }
    if rc.params.gamma == 0.0:
        payload["breaking"] = {"note": _GLOBAL_NOTE}
    else:
        verdict = blowup_condition(u0, rc.params)
        payload["breaking"] = {
            "threshold": verdict.threshold,
            "triggered": verdict.triggered,
            "witness_x0": verdict.witness_x0,
        }
    if result.stop_reason in ("blowup_slope", "blowup_nonfinite"):
        try:
            payload["t_star"] = extrapolate_blowup_time(result.slope_trace).t_star
        except ValueError:
            payload["t_star"] = None
    else:
        payload["t_star"] = None
    if rc.initial["kind"] == "soliton":
        profile = build_profile(SolitonParams(rc.initial["c"], rc.params), rc.grid,
                                tail_tol=max(rc.solver.decay_tolerance, 1e-10))
        payload["shape_error"] = shape_error(profile, result.final_state, result.t_stop)
    return payload


def _cmd_simulate(args) -> int:
    try:
        rc = load_run_config(args.config)
    except ConfigError as err:
        return _fail(str(err))
    out = args.out if args.out is not None else rc.outputs.directory
    if out is None:
        return _fail("no output directory: set --out or outputs.directory")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        u0 = build_initial_field(rc)
        result = simulate(u0, rc.params, rc.solver)
    except (AdmissibilityError, BoundaryDecayError, ValueError) as err:
        return _fail(str(err))

    payload = _summary_payload(rc, u0, result)
    if rc.outputs.write_checkpoints and result.checkpoints:
        payload["checkpoint_times"] = _write_checkpoints(result, out_dir / "checkpoints")
    if rc.outputs.write_trace:
        _write_trace(result, out_dir / "trace.csv")
    write_json(out_dir / "summary.json", payload)
    print(f"{result.stop_reason} at t = {fmt(result.t_stop)}; artifacts in {out_dir}")
    return 0


def _cmd_soliton(args) -> int:
    try:
        params = SolitonParams(args.c, PdeParams(gamma=args.gamma, omega=args.omega))
    except ValueError as err:
        return _fail(str(err))
    ok, diagnostic = check_admissible(params)
    if not ok:
        return _fail(diagnostic, code=1)
    try:
        grid = Grid(args.L, args.N)
        profile = build_profile(params, grid)
    except ValueError as err:
        return _fail(str(err), code=1)
    write_profile_csv(profile, args.out)
    residual = float(np.max(np.abs(first_integral_residual(profile))))
    print(f"a = {fmt(profile.amplitude)}")
    print(f"kappa = {fmt(profile.decay_rate)}")
    print(f"first_integral_residual_max = {fmt(residual)}")
    print(f"wrote profile to {args.out}")
    return 0


def _bound_payload(u0: Field, params: PdeParams) -> dict:
    bound = existence_bound(u0, params)
    payload = {
        "E0": bound.e0,
        "m0": bound.m0,
        "gamma_case": bound.gamma_case,
        "K": bound.bracket,
        "T_lower": bound.t_lower,
    }
    if params.gamma == 0.0:
        payload["note"] = _GLOBAL_NOTE
    else:
        verdict = blowup_condition(u0, params)
        payload["breaking_threshold"] = verdict.threshold
        payload["triggered"] = verdict.triggered
        if verdict.witness_x0 is not None:
            payload["witness_x0"] = verdict.witness_x0
    return payload


def _field_from_data_file(path: Path) -> Field:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.ndim != 2 or rows.shape[1] != 2 or rows.shape[0] < 16:
        raise ConfigError(f"{path}: expected at least 16 rows of x,u")
    x, u = rows[:, 0], rows[:, 1]
    n = len(x)
    if n % 2 != 0:
        raise ConfigError(f"{path}: grid size must be even, got {n}")
    h = x[1] - x[0]
    half_width = 0.5 * n * h
    grid = Grid(half_width, n)
    if not np.allclose(x, grid.x, rtol=0.0, atol=1e-9 * h):
        raise ConfigError(f"{path}: x column is not the uniform grid [-L, L)")
    return Field(grid, u)


def _cmd_bound(args) -> int:
    try:
        if args.config is not None:
            rc = load_run_config(args.config)
            params = rc.params
            u0 = build_initial_field(rc)
        else:
            if args.gamma is None:
                return _fail("--data requires --gamma (and optionally --omega)")
            params = PdeParams(gamma=args.gamma, omega=args.omega)
            u0 = _field_from_data_file(Path(args.data))
    except (ConfigError, ValueError, OSError) as err:
        return _fail(str(err))
    payload = _bound_payload(u0, params)
    text = json.dumps(jsonable(payload), indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
    return 0


def _cmd_sweep(args) -> int:
    try:
        sc = load_sweep_config(args.config)
        members = build_family(sc)
    except (ConfigError, ValueError) as err:
        return _fail(str(err))
    if sc.params.gamma == 0.0:
        return _fail(f"sweep requires gamma != 0 ({_GLOBAL_NOTE})")
    out = args.out if args.out is not None else sc.outputs.directory
    if out is None:
        return _fail("no output directory: set --out or outputs.directory")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def collect(fetch) -> tuple[list[SweepRow], int]:
        rows, failures = [], 0
        for i, (alpha, _) in enumerate(members):
            try:
                rows.append(fetch(i))
            except Exception as err:  # per-member failure: record and continue
                failures += 1
                print(f"member {i} (alpha = {alpha:g}) failed: {err}", file=sys.stderr)
                rows.append(_failed_row(i, alpha))
        return rows, failures

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [
                pool.submit(run_member, i, alpha, u0, sc.params, sc.solver)
                for i, (alpha, u0) in enumerate(members)
            ]
            rows, failures = collect(lambda i: futures[i].result())
    else:
        rows, failures = collect(
            lambda i: run_member(i, members[i][0], members[i][1], sc.params, sc.solver))
    for row in rows:
        if not row.censored and not math.isnan(row.ratio) and row.ratio < 0.98:
            print(f"member {row.family_id}: observed breaking time ratio "
                  f"{row.ratio:.4f} undercuts the proved bound; solver bug suspected",
                  file=sys.stderr)
    write_comparison_csv(rows, out_dir / "comparison.csv")
    print(f"wrote {len(rows)} rows to {out_dir / 'comparison.csv'}")
    return 0 if failures < len(members) else 1


def _failed_row(family_id: int, alpha: float) -> SweepRow:
    nan = math.nan
    return SweepRow(family_id=family_id, alpha=alpha, e0=nan, m0=nan,
                    gamma_case="error", bracket=nan, t_lower=nan, t_star=nan,
                    ratio=nan, censored=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispwave",
        description="Numerical laboratory for a family of nonlinearly dispersive wave equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a configured run and write artifacts")
    p_sim.add_argument("--config", required=True, help="run config JSON (or a summary.json)")
    p_sim.add_argument("--out", default=None, help="output directory (overrides config)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sol = sub.add_parser("soliton", help="build a solitary-wave profile CSV")
    p_sol.add_argument("--c", type=float, required=True, help="wave speed")
    p_sol.add_argument("--omega", type=float, required=True)
    p_sol.add_argument("--gamma", type=float, required=True)
    p_sol.add_argument("--L", type=float, required=True, help="box half-width")
    p_sol.add_argument("--N", type=int, required=True, help="grid points")
    p_sol.add_argument("--out", required=True, help="profile CSV path")
    p_sol.set_defaults(func=_cmd_soliton)

    p_bound = sub.add_parser("bound", help="breaking criterion and existence-time bound")
    group = p_bound.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="run config JSON")
    group.add_argument("--data", help="field CSV with columns x,u")
    p_bound.add_argument("--gamma", type=float, default=None)
    p_bound.add_argument("--omega", type=float, default=0.0)
    p_bound.add_argument("--out", default=None, help="also write the JSON here")
    p_bound.set_defaults(func=_cmd_bound)

    p_sweep = sub.add_parser("sweep", help="sharpness comparison over an initial-data family")
    p_sweep.add_argument("--config", required=True, help="sweep config JSON")
    p_sweep.add_argument("--out", default=None, help="output directory (overrides config)")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
