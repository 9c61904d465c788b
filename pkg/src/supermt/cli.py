"""Command-line front end: configuration, dispatch and serialization.

Every command writes a JSON summary (schema-checked before writing) plus
CSV series suitable for any plotting tool into the output directory
(--out, else $SUPERMT_OUTDIR, else ./supermt_out).  Outputs are
deterministic for a fixed config and seed: fixed float formatting, no
timestamps, seeded noise starts.

Exit codes: 0 success, 1 module-level failure (a JSON error record is
written), 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .radial import constants_for, make_grid, normalize, RadialFunction
from .functionals import FunctionalSpec, eval_functional
from .families import (MoserParams, blowup_table, concentrating_function,
                       default_family_grid, moser_function, write_blowup_csv)
from .maximize import MaximizerOptions, certified_gap_report, maximize
from .pde import (NonlinearitySpec, check_conditions, default_pde_grid,
                  eigenfunction, flux_identity_residual, lambda1,
                  mountain_pass_level, solve_bvp, variational_energy)

__all__ = ["ExperimentConfig", "run", "emit_plot_data", "main"]

FLOAT_FMT = "%.12g"

COMMANDS = ("constants", "eval", "maximize", "gap", "sharpness", "pde",
            "eigen", "conditions")

# required keys and types of every JSON summary, by command
_SCHEMAS = {
    "constants": {"command": str, "n": int, "sphere_surface": float,
                  "ball_volume": float, "alpha": float,
                  "harmonic_partial": float, "concentration_level": float},
    "eval": {"command": str, "kind": str, "n": int, "gamma": float,
             "input": str, "value": float, "diverged": bool},
    "maximize": {"command": str, "kind": str, "n": int, "gamma": float,
                 "best_value": float, "start_provenance": str,
                 "diverged": bool, "iterations": int, "seed": int,
                 "trace_summary": dict, "argmax_values": list,
                 "trace_file": str, "profile_file": str},
    "gap": {"command": str, "kind1": str, "kind2": str, "gap": float,
            "significant": bool, "note": str, "best1": float, "best2": float},
    "sharpness": {"command": str, "kind": str, "n": int, "gamma": float,
                  "fitted_slope": float, "expected_slope": float,
                  "rows_file": str},
    "pde": {"command": str, "n": int, "alpha": float, "alpha0": float,
            "c": float, "center_value": float, "boundary_residual": float,
            "flux_residual": float, "positive": bool, "monotone": bool,
            "variational_energy": float, "profile_file": str},
    "eigen": {"command": str, "n": int, "lambda1": float,
              "eigenfunction_file": str},
    "conditions": {"command": str, "n": int, "alpha": float, "alpha0": float,
                   "c": float, "results": dict},
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)


def validate_summary(command: str, summary: dict) -> None:
    """Check a summary against the emitting schema; raises on mismatch."""
    schema = _SCHEMAS[command]
    for key, typ in schema.items():
        if key not in summary:
            raise ValueError(f"summary for {command!r} misses key {key!r}")
        if not isinstance(summary[key], typ):
            raise ValueError(
                f"summary key {key!r} has type {type(summary[key]).__name__},"
                f" expected {typ.__name__}")


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FMT % x if isinstance(x, float) else x
                             for x in row])


def emit_plot_data(report, outdir: Path, stem: str) -> dict:
    """Write two-column series from a maximizer report: the accepted-value
    trace and the optimizer profile.  Returns the file names."""
    trace_file = outdir / f"{stem}_trace.csv"
    profile_file = outdir / f"{stem}_profile.csv"
    _write_csv(trace_file, ["iteration", "value"],
               [(i, float(v)) for i, (v, _, _) in enumerate(report.trace)])
    _write_csv(profile_file, ["r", "u"],
               list(zip(map(float, report.argmax.grid.nodes),
                        map(float, report.argmax.values))))
    return {"trace_file": trace_file.name, "profile_file": profile_file.name}


def _grid_from_params(p: dict, default_count=2000, default_grading="log",
                      default_strength=40.0):
    return make_grid(int(p.get("count", default_count)),
                     p.get("grading", default_grading),
                     strength=float(p.get("strength", default_strength)))


def _input_function(name: str, n: int, grid) -> RadialFunction:
    if name == "zero":
        return RadialFunction(grid=grid, values=np.zeros(grid.count), dim_n=n)
    if name.startswith("moser:"):
        return moser_function(MoserParams(j=float(name[6:]), n=n), grid)
    if name.startswith("conc:"):
        return concentrating_function(float(name[5:]), n, grid)[0]
    raise ValueError(f"unknown input function {name!r} "
                     "(use zero | moser:J | conc:EPS)")


def _cmd_constants(p: dict, outdir: Path) -> dict:
    c = constants_for(int(p["n"]))
    return {"command": "constants", "n": c.n, "sphere_surface": c.omega,
            "ball_volume": c.ball_volume, "alpha": c.alpha,
            "harmonic_partial": c.harmonic_partial,
            "concentration_level": c.concentration_level}


def _spec_from_params(p: dict) -> FunctionalSpec:
    n = int(p["n"])
    consts = constants_for(n)
    gamma = consts.alpha * float(p.get("gamma_mult", 1.0))
    kind = p.get("kind", "mt")
    alpha = float(p.get("alpha", 1.0)) if kind in ("mt1", "mt2") else None
    return FunctionalSpec(kind=kind, n=n, gamma=gamma, alpha=alpha)


def _cmd_eval(p: dict, outdir: Path) -> dict:
    spec = _spec_from_params(p)
    grid = _grid_from_params(p)
    u = _input_function(p.get("input", "zero"), spec.n, grid)
    fv = eval_functional(u, spec)
    return {"command": "eval", "kind": spec.kind, "n": spec.n,
            "gamma": spec.gamma, "input": p.get("input", "zero"),
            "value": fv.value, "diverged": fv.diverged}


def _cmd_maximize(p: dict, outdir: Path) -> dict:
    spec = _spec_from_params(p)
    grid = _grid_from_params(p)
    opts = MaximizerOptions(seed=int(p.get("seed", 0)),
                            max_iters=int(p.get("max_iters", 600)),
                            tol_rel=float(p.get("tol_rel", 1e-8)),
                            monotone_projection=bool(p.get("monotone", False)))
    report = maximize(spec, grid, opts)
    files = emit_plot_data(report, outdir, "maximize")
    return {"command": "maximize", "kind": spec.kind, "n": spec.n,
            "gamma": spec.gamma, "best_value": report.best_value,
            "start_provenance": report.start_provenance,
            "diverged": report.diverged, "iterations": report.iterations,
            "seed": opts.seed, **files}


def _cmd_gap(p: dict, outdir: Path) -> dict:
    n = int(p["n"])
    consts = constants_for(n)
    gamma = consts.alpha * float(p.get("gamma_mult", 1.0))
    alpha = float(p.get("alpha", 1.0))

    def mkspec(kind):
        return FunctionalSpec(kind=kind, n=n, gamma=gamma,
                              alpha=alpha if kind in ("mt1", "mt2") else None)

    grid = _grid_from_params(p)
    opts = MaximizerOptions(seed=int(p.get("seed", 0)))
    rep = certified_gap_report(mkspec(p.get("kind1", "mt1")),
                               mkspec(p.get("kind2", "mt")), grid, opts)
    emit_plot_data(rep.first, outdir, "gap_first")
    emit_plot_data(rep.second, outdir, "gap_second")
    return {"command": "gap", "kind1": p.get("kind1", "mt1"),
            "kind2": p.get("kind2", "mt"), "gap": rep.gap,
            "significant": rep.significant, "note": rep.note,
            "best1": rep.first.best_value, "best2": rep.second.best_value}


def _cmd_sharpness(p: dict, outdir: Path) -> dict:
    n = int(p["n"])
    consts = constants_for(n)
    gamma = consts.alpha * float(p.get("gamma_mult", 1.1))
    j_list = [float(x) for x in str(p.get("j", "64,256,1024")).split(",")]
    rows = blowup_table(p.get("kind", "mt2"), gamma, float(p.get("alpha", 1.0)),
                        n, j_list, count=int(p.get("count", 20000)))
    rows_file = outdir / "sharpness.csv"
    write_blowup_csv(rows, rows_file)
    finite = [(r.j, r.value) for r in rows if not r.diverged]
    slope = float("nan")
    if len(finite) >= 2:
        lj = np.log([j for j, _ in finite])
        lv = np.log([v for _, v in finite])
        slope = float(np.polyfit(lj, lv, 1)[0])
    _write_csv(outdir / "sharpness_loglog.csv", ["log_j", "log_value"],
               [(math.log(j), math.log(v)) for j, v in finite])
    return {"command": "sharpness", "kind": p.get("kind", "mt2"), "n": n,
            "gamma": gamma, "fitted_slope": slope,
            "expected_slope": n * (gamma / consts.alpha - 1.0),
            "rows_file": rows_file.name}


def _cmd_pde(p: dict, outdir: Path) -> dict:
    n = int(p["n"])
    consts = constants_for(n)
    spec = NonlinearitySpec(n=n, alpha=float(p.get("alpha", 1.0)),
                            alpha0=consts.alpha * float(p.get("alpha0_mult", 1.0)),
                            c=float(p.get("c", 1.0)))
    grid = default_pde_grid(int(p.get("count", 2000)))
    shot = solve_bvp(spec, grid=grid, s_max=float(p.get("s_max", 10.0)))
    flux_res = flux_identity_residual(shot, spec)
    energy = variational_energy(shot.profile, spec)
    prof_file = outdir / "pde_profile.csv"
    r = shot.grid.nodes
    n1 = n - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        uprime = np.where(r > 0.0,
                          np.sign(shot.w_nodes)
                          * (np.abs(shot.w_nodes) / np.maximum(r, 1e-300) ** n1)
                          ** (1.0 / n1),
                          0.0)
    _write_csv(prof_file, ["r", "u", "uprime", "flux"],
               list(zip(map(float, r), map(float, shot.profile.values),
                        map(float, uprime), map(float, shot.w_nodes))))
    levels = [mountain_pass_level(spec, j)
              for j in [int(x) for x in str(p.get("j", "64,256,1024")).split(",")]]
    _write_csv(outdir / "pde_mountain_pass.csv", ["j", "t_star", "level", "bound"],
               [(mp.j, mp.t_star, mp.level, mp.bound) for mp in levels])
    return {"command": "pde", "n": n, "alpha": spec.alpha,
            "alpha0": spec.alpha0, "c": spec.c,
            "center_value": float(shot.u_nodes[0]),
            "boundary_residual": shot.boundary_residual,
            "flux_residual": flux_res, "positive": shot.positive,
            "monotone": shot.monotone, "variational_energy": energy,
            "profile_file": prof_file.name,
            "mountain_pass": [{"j": mp.j, "level": mp.level,
                               "bound": mp.bound,
                               "below_bound": mp.below_bound}
                              for mp in levels]}


def _cmd_eigen(p: dict, outdir: Path) -> dict:
    n = int(p["n"])
    lam = lambda1(n)
    grid = default_pde_grid(int(p.get("count", 2000)))
    ef = eigenfunction(n, grid)
    ef_file = outdir / "eigenfunction.csv"
    _write_csv(ef_file, ["r", "u"],
               list(zip(map(float, grid.nodes), map(float, ef.values))))
    return {"command": "eigen", "n": n, "lambda1": lam,
            "eigenfunction_file": ef_file.name}


def _cmd_conditions(p: dict, outdir: Path) -> dict:
    n = int(p["n"])
    consts = constants_for(n)
    spec = NonlinearitySpec(n=n, alpha=float(p.get("alpha", 1.0)),
                            alpha0=consts.alpha * float(p.get("alpha0_mult", 1.0)),
                            c=float(p.get("c", 1.0)))
    report = check_conditions(spec)
    return {"command": "conditions", "n": n, "alpha": spec.alpha,
            "alpha0": spec.alpha0, "c": spec.c,
            "results": {k: v.passed for k, v in report.entries.items()},
            "details": report.as_dict()}


_DISPATCH = {
    "constants": _cmd_constants,
    "eval": _cmd_eval,
    "maximize": _cmd_maximize,
    "gap": _cmd_gap,
    "sharpness": _cmd_sharpness,
    "pde": _cmd_pde,
    "eigen": _cmd_eigen,
    "conditions": _cmd_conditions,
}


def _validate_config(config: ExperimentConfig) -> None:
    if config.command not in COMMANDS:
        raise ValueError(f"unknown command {config.command!r}")
    p = config.params
    n = p.get("n")
    if n is None or int(n) < 2:
        raise ValueError("parameter n must be an integer >= 2")
    if int(p.get("count", 2000)) < 16:
        raise ValueError("grid count must be >= 16")
    for key in ("gamma_mult", "alpha", "alpha0_mult", "strength", "s_max"):
        if key in p and float(p[key]) <= 0.0:
            raise ValueError(f"parameter {key} must be positive")


def run(config: ExperimentConfig) -> int:
    """Validate, dispatch, and serialize one experiment. Returns exit status."""
    try:
        _validate_config(config)
    except (ValueError, KeyError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    outdir = Path(config.params.get("out")
                  or os.environ.get("SUPERMT_OUTDIR", "supermt_out"))
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        summary = _DISPATCH[config.command](config.params, outdir)
        validate_summary(config.command, summary)
    except Exception as exc:   # module-level failure: record and exit 1
        record = {"command": config.command, "error": str(exc),
                  "error_type": type(exc).__name__}
        _write_json(outdir / f"{config.command}_error.json", record)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_json(outdir / f"{config.command}_summary.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supermt",
        description="Numerical lab for supercritical exponential-integral "
                    "functionals on radial profiles and the radial "
                    "n-Laplacian boundary value problem.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, count=2000, strength=40.0):
        sp.add_argument("--n", type=int, required=True, help="dimension (>= 2)")
        sp.add_argument("--out", type=str, default=None,
                        help="output directory (default $SUPERMT_OUTDIR or ./supermt_out)")
        sp.add_argument("--count", type=int, default=count, help="grid node count")
        sp.add_argument("--strength", type=float, default=strength,
                        help="log-grading strength of the grid")

    sp = sub.add_parser("constants", help="dimensional constants as JSON")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("eval", help="evaluate one functional on one profile")
    common(sp)
    sp.add_argument("--kind", choices=["mt", "mt1", "mt2"], default="mt")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma-mult", dest="gamma_mult", type=float, default=1.0,
                    help="gamma as a multiple of the sharp constant")
    sp.add_argument("--input", type=str, default="zero",
                    help="zero | moser:J | conc:EPS")

    sp = sub.add_parser("maximize", help="constrained maximization")
    common(sp)
    sp.add_argument("--kind", choices=["mt", "mt1", "mt2"], default="mt")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma-mult", dest="gamma_mult", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-iters", dest="max_iters", type=int, default=600)
    sp.add_argument("--monotone", action="store_true",
                    help="decreasing rearrangement after each projection")

    sp = sub.add_parser("gap", help="maximize two specs on one grid, report the gap")
    common(sp)
    sp.add_argument("--kind1", choices=["mt", "mt1", "mt2"], default="mt1")
    sp.add_argument("--kind2", choices=["mt", "mt1", "mt2"], default="mt")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma-mult", dest="gamma_mult", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("sharpness", help="supercritical blow-up table on the Moser sweep")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--count", type=int, default=20000)
    sp.add_argument("--kind", choices=["mt", "mt1", "mt2"], default="mt2")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--gamma-mult", dest="gamma_mult", type=float, default=1.1)
    sp.add_argument("--j", type=str, default="64,256,1024",
                    help="comma-separated Moser indices")

    sp = sub.add_parser("pde", help="solve the boundary value problem, check levels")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--count", type=int, default=2000)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--alpha0-mult", dest="alpha0_mult", type=float, default=1.0,
                    help="critical growth rate as a multiple of the sharp constant")
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--s-max", dest="s_max", type=float, default=10.0)
    sp.add_argument("--j", type=str, default="64,256,1024")

    sp = sub.add_parser("eigen", help="first radial n-Laplacian eigenvalue")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--count", type=int, default=2000)

    sp = sub.add_parser("conditions", help="nonlinearity condition battery")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--alpha0-mult", dest="alpha0_mult", type=float, default=1.0)
    sp.add_argument("--c", type=float, default=1.0)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    params = {k: v for k, v in vars(args).items()
              if k != "command" and v is not None}
    return run(ExperimentConfig(command=args.command, params=params))


if __name__ == "__main__":
    sys.exit(main())
