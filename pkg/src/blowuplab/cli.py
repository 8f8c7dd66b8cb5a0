"""Command-line entry point.

Subcommands: classify, bound, simulate, sweep, atlas, converge.  Every
subcommand prints a JSON summary to stdout; file-producing subcommands
write their artifacts under --out with fixed names.  A flat key=value
config file (--config) can supply any option; explicit flags win.  All
outputs are pure functions of the effective configuration, so repeated
invocations are byte-identical.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import bound_engine, diagram, experiments, exponents, solver

ENV_JOBS = "BLOWUPLAB_JOBS"


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


# option registry: dest -> (type, default, help); argparse defaults stay None
# so config-file values can slot under explicit flags.  REQUIRED marks
# options that must come from a flag or the config file; OPTIONAL marks
# options whose absence is meaningful.

REQUIRED = object()
OPTIONAL = object()

_MODEL_OPTS = {
    "n": (int, REQUIRED, "space dimension (integer >= 2); required"),
    "mu": (float, REQUIRED, "damping coefficient of mu/(1+t) v_t; required"),
    "nu": (float, 0.0, "mass coefficient of nu/(1+t)^2 v"),
    "p": (float, REQUIRED, "nonlinearity power (> 1); required"),
    "kbar": (float, REQUIRED, "data decay parameter (> -1); required"),
    "M": (float, 1.0, "data amplitude (> 0)"),
    "eps": (float, 1.0, "data size (> 0)"),
}

_BOUND_OPTS = {
    "delta": (float, 1.0, "blow-up set margin delta (> 0)"),
    "delta_m": (float, 1.0, "free-wave floor constant delta_m (> 0, user-supplied; all bounds conditional on it)"),
    "k_max": (int, 200, "iteration depth for the K construction"),
}

_GRID_OPTS = {
    "dr": (float, 0.05, "radial step (length units)"),
    "r_max": (float, REQUIRED, "outer radius; must exceed t_max/cfl (causal closure); required"),
    "t_max": (float, REQUIRED, "maximal simulated time; required"),
    "cfl": (float, 0.7, "Courant ratio dt/dr in (0, 1]; validated against the n-dependent stability limit"),
    "u_threshold": (float, 1e8, "amplitude threshold declaring blow-up"),
}


def _add_opts(parser: argparse.ArgumentParser, opts: dict) -> None:
    for dest, (typ, default, help_text) in opts.items():
        flag = "--" + dest.replace("_", "-")
        if typ is bool:
            parser.add_argument(flag, dest=dest, action="store_true", default=None, help=help_text)
        else:
            shown = "" if default in (REQUIRED, OPTIONAL) else f" [default: {default}]"
            parser.add_argument(flag, dest=dest, type=typ, default=None, help=help_text + shown)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowuplab",
        description="Blow-up classification, lifespan bounds, and radial solver experiments "
        "for scale-invariant damped semilinear wave equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def new_cmd(name: str, help_text: str, opts: dict, handler, with_out: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="flat key=value config file; flags override it")
        if with_out:
            p.add_argument("--out", type=str, default=None, help="output directory for artifacts [default: out]")
        _add_opts(p, opts)
        p.set_defaults(handler=handler, opts=opts, with_out=with_out)
        return p

    new_cmd("classify", "classify one (n, mu, nu, kbar, p) point", dict(_MODEL_OPTS), _cmd_classify, with_out=False)

    new_cmd("bound", "explicit lifespan upper bound (conditional on delta_m)", {**_MODEL_OPTS, **_BOUND_OPTS}, _cmd_bound, with_out=False)

    sim_opts = {
        **_MODEL_OPTS,
        **_GRID_OPTS,
        "form": (str, "u", "solution form: u, v, free, or both (runs u and v plus transform check)"),
        "snapshot_times": (_float_list, (), "comma-separated times for CSV profile snapshots"),
        "history": (bool, False, "include the full amplitude history in the summary JSON"),
    }
    new_cmd("simulate", "one solver run (+ optional transform check)", sim_opts, _cmd_simulate)

    sweep_opts = {
        **{k: v for k, v in _MODEL_OPTS.items() if k != "eps"},
        **_GRID_OPTS,
        "eps_values": (_float_list, REQUIRED, "comma-separated eps grid, strictly increasing, >= 4 values; required"),
        "refinement_levels": (int, 2, "mesh refinement levels per eps (T_num from the finest)"),
        "form": (str, "u", "solution form for the runs: u or v"),
        "jobs": (int, OPTIONAL, f"worker pool size [default: ${ENV_JOBS} or cpu count]"),
        "slope_tol": (float, 0.25, "relative tolerance on slope vs -alpha for the pass flag"),
        "r2_min": (float, 0.95, "minimal r^2 for the pass flag"),
        "check_bound": (bool, False, "also compare every T_num against the lifespan upper bound"),
        "delta": _BOUND_OPTS["delta"],
        "delta_m": _BOUND_OPTS["delta_m"],
    }
    new_cmd("sweep", "eps-sweep with lifespan power-law fit", sweep_opts, _cmd_sweep)

    atlas_opts = {
        "n": _MODEL_OPTS["n"],
        "mu": _MODEL_OPTS["mu"],
        "nu": _MODEL_OPTS["nu"],
        "kbar_min": (float, -0.5, "lower end of the kbar grid (> -1)"),
        "kbar_max": (float, 4.0, "upper end of the kbar grid"),
        "kbar_count": (int, 100, "number of kbar grid nodes"),
        "p_min": (float, 1.05, "lower end of the p grid (> 1)"),
        "p_max": (float, 3.5, "upper end of the p grid"),
        "p_count": (int, 100, "number of p grid nodes"),
        "curve_samples": (int, 512, "samples per boundary curve"),
        "format": (str, "both", "artifacts to write: csv, svg, or both"),
    }
    new_cmd("atlas", "region diagram over a (kbar, p) grid", atlas_opts, _cmd_atlas)

    conv_opts = {
        **_MODEL_OPTS,
        **_GRID_OPTS,
        "levels": (int, 3, "number of refinement levels (>= 3)"),
        "compare_time": (float, OPTIONAL, "profile comparison time [default: t_max / 2]"),
        "form": (str, "u", "solution form: u, v, or free"),
    }
    new_cmd("converge", "mesh refinement study (observed order)", conv_opts, _cmd_converge)

    return parser


def _read_config(path: str, opts: dict) -> dict:
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in opts:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        typ = opts[key][0]
        values[key] = _bool(value) if typ is bool else typ(value.strip())
    return values


def _merge(args: argparse.Namespace) -> dict:
    opts = args.opts
    merged = {dest: default for dest, (_, default, _) in opts.items()}
    if args.config:
        merged.update(_read_config(args.config, opts))
    for dest in opts:
        flag_value = getattr(args, dest, None)
        if flag_value is not None:
            merged[dest] = flag_value
    missing = [dest for dest, value in merged.items() if value is REQUIRED]
    if missing:
        raise ValueError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in sorted(missing)))
    for dest, value in merged.items():
        if value is OPTIONAL:
            merged[dest] = None
    if getattr(args, "with_out", False):
        merged["out"] = args.out if args.out is not None else "out"
    return merged


def _params(cfg: dict) -> exponents.ModelParams:
    return exponents.ModelParams(
        n=cfg["n"], mu=cfg["mu"], nu=cfg["nu"], p=cfg["p"], kbar=cfg["kbar"], M=cfg["M"], eps=cfg["eps"]
    )


def _grid(cfg: dict) -> solver.GridSpec:
    return solver.GridSpec(
        dr=cfg["dr"], r_max=cfg["r_max"], t_max=cfg["t_max"], cfl=cfg["cfl"], u_threshold=cfg["u_threshold"]
    )


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _jobs(cfg: dict) -> int:
    if cfg.get("jobs") is not None:
        return max(1, int(cfg["jobs"]))
    env = os.environ.get(ENV_JOBS)
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _cmd_classify(cfg: dict) -> int:
    verdict = exponents.classify(_params(cfg))
    _emit(
        {
            "kind": verdict.kind.value,
            "lifespan_exponent": verdict.lifespan_exponent,
            "active_constraints": list(verdict.active_constraints),
        }
    )
    return 0


def _cmd_bound(cfg: dict) -> int:
    bc = bound_engine.BoundConfig(params=_params(cfg), delta=cfg["delta"], delta_m=cfg["delta_m"])
    consts = bound_engine.derive_K(bc, k_max=cfg["k_max"])
    bound = bound_engine.lifespan_upper_bound(bc, k_max=cfg["k_max"])
    _emit(
        {
            "C0": math.exp(consts.logC0),
            "K": consts.K,
            "S_limit": consts.S_limit,
            "C": bound.C,
            "exponent": bound.exponent,
            "T_upper": bound.T_upper,
            "delta_m": cfg["delta_m"],
            "conditional": True,
        }
    )
    return 0


def _write_snapshots(path: Path, snapshots) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,r,u\n")
        for snap in snapshots:
            for rv, uv in zip(snap.r, snap.u):
                fh.write(f"{snap.t:.12g},{rv:.12g},{uv:.12g}\n")


def _run_payload(result: solver.SolverRun, with_history: bool) -> dict:
    payload = {
        "form": result.form.value,
        "params": dataclasses.asdict(result.params),
        "grid": dataclasses.asdict(result.grid),
        "outcome": result.outcome,
        "T_num": result.T_num,
        "t_end": result.t_end,
    }
    if with_history:
        payload["max_amplitude_history"] = [[t, a] for t, a in result.amplitude_history.tolist()]
    return payload


def _cmd_simulate(cfg: dict) -> int:
    params = _params(cfg)
    grid = _grid(cfg)
    out = _out_dir(cfg)
    form_key = cfg["form"].lower()
    times = cfg["snapshot_times"]
    with_history = bool(cfg["history"])
    payload: dict = {}
    files = []
    if form_key == "both":
        report = solver.transform_check(params, grid, times=times or ())
        for form in (solver.Form.U, solver.Form.V):
            result = solver.run(form, params, grid, snapshot_times=times or (), collect_history=with_history)
            name = f"snapshots_{form.value}.csv"
            _write_snapshots(out / name, result.snapshots)
            files.append(name)
            payload[form.value] = _run_payload(result, with_history)
        payload["transform_check"] = {
            "times": list(report.times),
            "discrepancies": list(report.discrepancies),
            "max_rel_discrepancy": report.max_rel_discrepancy,
        }
    else:
        try:
            form = solver.Form(form_key)
        except ValueError:
            raise ValueError(f"unknown form {cfg['form']!r}; expected u, v, free, or both") from None
        result = solver.run(form, params, grid, snapshot_times=times or (), collect_history=True)
        name = f"snapshots_{form.value}.csv"
        _write_snapshots(out / name, result.snapshots)
        files.append(name)
        payload = _run_payload(result, with_history)
    payload["files"] = files
    (out / "run_summary.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(payload)
    return 0


def _cmd_sweep(cfg: dict) -> int:
    base = exponents.ModelParams(
        n=cfg["n"], mu=cfg["mu"], nu=cfg["nu"], p=cfg["p"], kbar=cfg["kbar"], M=cfg["M"], eps=cfg["eps_values"][0]
    )
    form_key = cfg["form"].lower()
    if form_key not in ("u", "v"):
        raise ValueError(f"sweep form must be u or v, got {cfg['form']!r}")
    spec = experiments.SweepSpec(
        params_base=base,
        eps_values=cfg["eps_values"],
        grid=_grid(cfg),
        refinement_levels=cfg["refinement_levels"],
        form=solver.Form(form_key),
    )
    result = experiments.sweep(spec, jobs=_jobs(cfg))
    out = _out_dir(cfg)

    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("eps,T_num,refinement_agreement\n")
        for pt in result.points:
            t_field = "" if pt.T_num is None else f"{pt.T_num:.12g}"
            a_field = "" if pt.refinement_agreement is None else f"{pt.refinement_agreement:.12g}"
            fh.write(f"{pt.eps:.12g},{t_field},{a_field}\n")

    alpha = result.alpha_theory
    fit_ok = (
        result.complete
        and math.isfinite(result.slope)
        and abs(result.slope + alpha) / alpha <= cfg["slope_tol"]
        and result.r_squared >= cfg["r2_min"]
    )
    summary = {
        "slope": result.slope,
        "intercept": result.intercept,
        "r_squared": result.r_squared,
        "alpha_theory": alpha,
        "pass": bool(fit_ok),
        "points": [[pt.eps, pt.T_num, pt.refinement_agreement] for pt in result.points],
        "survived_eps": list(result.survived_eps),
        "note": result.note,
    }
    if cfg["check_bound"]:
        bc = bound_engine.BoundConfig(params=base, delta=cfg["delta"], delta_m=cfg["delta_m"])
        report = experiments.check_upper_bound(spec, bc, sweep_result=result)
        summary["bound_check"] = {
            "rows": [[r.eps, r.T_num, r.T_upper, r.ok, r.vacuous] for r in report.rows],
            "delta_m": report.delta_m,
            "conditional": report.conditional,
            "all_ok": report.all_ok,
            "note": report.note,
        }
        (out / "bound_check.json").write_text(
            json.dumps(summary["bound_check"], indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    (out / "sweep_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(summary)
    return 0


def _cmd_atlas(cfg: dict) -> int:
    if cfg["format"] not in ("csv", "svg", "both"):
        raise ValueError(f"format must be csv, svg, or both, got {cfg['format']!r}")
    result = exponents.atlas(
        n=cfg["n"],
        mu=cfg["mu"],
        nu=cfg["nu"],
        k_grid=(cfg["kbar_min"], cfg["kbar_max"], cfg["kbar_count"]),
        p_grid=(cfg["p_min"], cfg["p_max"], cfg["p_count"]),
        curve_samples=cfg["curve_samples"],
    )
    out = _out_dir(cfg)
    files = []
    if cfg["format"] in ("csv", "both"):
        result.to_csv(out / "atlas.csv")
        files.append("atlas.csv")
    if cfg["format"] in ("svg", "both"):
        diagram.write_atlas_svg(result, out / "atlas.svg")
        files.append("atlas.svg")
    kb_label, ps_label = diagram.exact_boundary_labels(cfg["n"], cfg["mu"])
    _emit(
        {
            "kbar0": result.kbar0,
            "kbar0_exact": kb_label,
            "p_strauss": result.p_strauss,
            "p_strauss_exact": ps_label,
            "counts": result.verdict_counts(),
            "files": files,
        }
    )
    return 0


def _cmd_converge(cfg: dict) -> int:
    try:
        form = solver.Form(cfg["form"].lower())
    except ValueError:
        raise ValueError(f"unknown form {cfg['form']!r}; expected u, v, or free") from None
    report = experiments.convergence_study(
        _params(cfg), _grid(cfg), levels=cfg["levels"], form=form, compare_time=cfg.get("compare_time")
    )
    out = _out_dir(cfg)
    payload = {
        "dr_values": list(report.dr_values),
        "compare_time": report.compare_time,
        "profile_errors": list(report.profile_errors),
        "profile_orders": list(report.profile_orders),
        "T_nums": list(report.T_nums),
        "T_order": report.T_order,
        "T_agreement": report.T_agreement,
        "passed": report.passed,
    }
    (out / "convergence.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(payload)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge(args)
        return args.handler(cfg)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal assertion / unexpected state
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
