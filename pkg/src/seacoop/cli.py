"""Command-line front end.

    seacoop solve    --config F [--theta X]        per-node trajectory
    seacoop optimize --config F [--theta-step S]   subsidy curve + optima
    seacoop sweep    --config F --spec G           factorial sweep table
    seacoop compare  --config F                    WORC vs WRC report

Exit codes: 0 ok, 1 invalid input, 2 no feasible subsidy rate, 64 usage.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .equilibrium import build_trajectory, profits
from .experiments import compare_scenarios, spec_from_dict, sweep
from .model import BASE_Q, ConfigError, DomainError, validate_config, validate_theta
from .subsidy import DEFAULT_THETA_STEP, OptimizationError, optimal_rates, scan_subsidy

EX_OK, EX_INVALID, EX_INFEASIBLE, EX_USAGE = 0, 1, 2, 64

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v):
    """Stable text form of a cell: 17 significant digits for floats."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def jsonable(v):
    if isinstance(v, float) and v != v:
        return None
    if hasattr(v, "item"):
        return jsonable(v.item())
    return v


def render(columns, rows, summary, fmt_name):
    if fmt_name == "json":
        doc = {
            "columns": list(columns),
            "rows": [[jsonable(c) for c in r] for r in rows],
            "summary": {k: jsonable(v) for k, v in (summary or {}).items()},
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(c) for c in r) + "\n")
    return buf.getvalue()


def build_parser():
    p = _Parser(prog="seacoop", description="Cooperative search-advertising equilibrium solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", type=Path, help="JSON configuration file")
        sp.add_argument("--scenario", choices=("I", "II"))
        sp.add_argument("--grid-steps", type=int)
        sp.add_argument("--output", type=Path, help="write here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("solve", help="equilibrium trajectory at a fixed subsidy rate")
    common(sp)
    sp.add_argument("--theta", type=float)

    sp = sub.add_parser("optimize", help="scan the subsidy rate")
    common(sp)
    sp.add_argument("--theta-step", type=float, default=DEFAULT_THETA_STEP)

    sp = sub.add_parser("sweep", help="factorial parameter sweep")
    common(sp)
    sp.add_argument("--spec", type=Path, required=True)

    sp = sub.add_parser("compare", help="with vs without retail competition")
    common(sp)
    sp.add_argument("--theta-step", type=float, default=DEFAULT_THETA_STEP)
    sp.add_argument("--theta", type=float, help="matched rate for path comparison")
    return p


def load_config(args, force_scenario=None):
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError([("config", f"cannot read {args.config}: {exc}")]) from None
        if not isinstance(raw, dict):
            raise ConfigError([("config", "top level must be a JSON object")])
    if args.scenario:
        raw["scenario"] = args.scenario
    if args.grid_steps is not None:
        raw["grid_steps"] = args.grid_steps
    if getattr(args, "theta", None) is not None:
        raw["theta"] = args.theta
    if force_scenario:
        raw["scenario"] = force_scenario
        raw.setdefault("q2", BASE_Q)
    return validate_config(raw)


def emit(args, text, manifest, extra=None):
    if args.output is None:
        sys.stdout.write(text)
        return
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(text)
    outputs = [str(args.output)]
    for path, body in (extra or {}).items():
        path.write_text(body)
        outputs.append(str(path))
    manifest["outputs"] = outputs
    Path(str(args.output) + ".manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


def manifest_for(args, cfg, **more):
    m = {
        "command": args.command,
        "config": cfg.to_dict(),
        "grid_steps": cfg.grid_steps,
        "version": __version__,
    }
    m.update(more)
    return m


def cmd_solve(args):
    cfg = load_config(args)
    theta = cfg.theta if cfg.theta is not None else 0.0
    traj = build_trajectory(cfg, validate_theta(theta))
    if not traj.feasible:
        raise OptimizationError(f"theta={theta} is infeasible")
    rep = profits(cfg, traj)
    cols = ["t", "x", "u1", "v"] + (["u2"] if cfg.scenario == "II" else [])
    arrays = [traj.t, traj.x, traj.u1, traj.v] + ([traj.u2] if cfg.scenario == "II" else [])
    rows = [[float(a[k]) for a in arrays] for k in range(len(traj.t))]
    summary = {"theta": theta, "J1": rep.J1, "JM": rep.JM, "Jchannel": rep.Jchannel}
    if rep.J2 is not None:
        summary["J2"] = rep.J2
    summary["projection_active"] = ",".join(k for k, v in traj.projection_active.items() if v)
    emit(args, render(cols, rows, summary, args.format), manifest_for(args, cfg, theta=theta))


def _summary_text(summary):
    return json.dumps({k: jsonable(v) for k, v in summary.items()}, indent=1) + "\n"


def cmd_optimize(args):
    cfg = load_config(args)
    curve = scan_subsidy(cfg, args.theta_step)
    star, bar = optimal_rates(curve)
    i_s = int((curve.thetas == star).argmax())
    i_b = int((curve.thetas == bar).argmax())
    summary = {
        "theta_star": star,
        "theta_bar": bar,
        "JM_at_theta_star": float(curve.JM[i_s]),
        "Jchannel_at_theta_bar": float(curve.Jchannel[i_b]),
        "feasible_points": int(curve.feasible.sum()),
        "grid_points": int(curve.thetas.size),
    }
    cols = ["theta", "JM", "Jchannel", "feasible"]
    rows = [list(r) for r in curve.rows()]
    man = manifest_for(args, cfg, theta_step=args.theta_step)
    if args.format == "json" or args.output is None:
        if args.format == "csv":
            sys.stderr.write(" ".join(f"{k}={fmt(v)}" for k, v in summary.items()) + "\n")
        emit(args, render(cols, rows, summary, args.format), man)
    else:
        side = Path(str(args.output) + ".summary.json")
        emit(args, render(cols, rows, None, "csv"), man, {side: _summary_text(summary)})


def cmd_sweep(args):
    cfg = load_config(args)
    try:
        raw = json.loads(args.spec.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError([("spec", f"cannot read {args.spec}: {exc}")]) from None
    spec = spec_from_dict(cfg, raw)
    res = sweep(spec)
    cols = res.columns
    rows = [[row.get(c) for c in cols] for row in res.rows]
    summary = {"rows": len(rows), **res.cross_effects()}
    man = manifest_for(args, cfg, spec=raw)
    if args.format == "json" or args.output is None:
        emit(args, render(cols, rows, summary if args.format == "json" else None, args.format), man)
    else:
        side = Path(str(args.output) + ".summary.json")
        emit(args, render(cols, rows, None, "csv"), man, {side: _summary_text(summary)})


def cmd_compare(args):
    cfg = load_config(args, force_scenario="II")
    if args.theta is not None:
        validate_theta(args.theta)
    rep = compare_scenarios(cfg, args.theta_step, args.theta)
    w, c = rep.worc, rep.wrc
    cols = ["t", "x_worc", "x_wrc", "u1_worc", "u1_wrc", "v_worc", "v_wrc", "u2_wrc",
            "u1_worc_matched", "u1_wrc_matched", "v_worc_matched", "v_wrc_matched"]
    arrays = [w.at_star.t, w.at_star.x, c.at_star.x, w.at_star.u1, c.at_star.u1, w.at_star.v, c.at_star.v,
              c.at_star.u2, w.at_matched.u1, c.at_matched.u1, w.at_matched.v, c.at_matched.v]
    rows = [[float(a[k]) for a in arrays] for k in range(len(w.at_star.t))]
    summary = rep.summary()
    man = manifest_for(args, cfg, theta_step=args.theta_step)
    if args.format == "json" or args.output is None:
        if args.format == "csv":
            sys.stderr.write(" ".join(f"{k}={fmt(v)}" for k, v in summary.items()) + "\n")
        emit(args, render(cols, rows, summary, args.format), man)
    else:
        side = Path(str(args.output) + ".summary.json")
        emit(args, render(cols, rows, None, "csv"), man, {side: _summary_text(summary)})


COMMANDS = {"solve": cmd_solve, "optimize": cmd_optimize, "sweep": cmd_sweep, "compare": cmd_compare}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EX_USAGE
    try:
        COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EX_INVALID
    except OptimizationError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EX_INFEASIBLE
    return EX_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
