"""Command-line front end: ``fogpss simulate | solve-fde | check-stability | reproduce``."""

from __future__ import annotations

import argparse
import ast
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .abm import abm_solve
from .config import ConfigError, bundled_config_path, load_config
from .controllers import FogpssConfig
from .errors import AssumptionViolation, BlowUpError, GainConditionError
from .reproduce import REPORTED_BETA_HAT, REPORTED_ENTRY_TIME, RUNNERS, ml_problem, solve_fde_demo
from .simkit import SimTrace, simulate
from .stability import LinearFoSystem, check_linear_fo_stability
from .traceio import svg_line_chart, trace_csv_text, write_trace_csv

__all__ = ["main", "build_parser", "summary_text", "write_artifacts"]

EXIT_OK, EXIT_ERROR, EXIT_UNSTABLE = 0, 1, 2


def summary_text(trace: SimTrace, cfg) -> str:
    sim = cfg.sim if hasattr(cfg, "sim") else cfg
    ctrl = sim.controller
    lines = [f"config_hash = {trace.meta['config_hash']}", f"scheme = {trace.meta['scheme']}",
             f"steps = {len(trace.t) - 1}", f"h = {sim.h:g}", f"T = {sim.T:g}"]
    if isinstance(ctrl, FogpssConfig):
        radius = trace.bound_radius
        t_r = trace.entry_time(radius)
        t_03 = trace.entry_time(0.3)
        t_m = trace.entry_time(ctrl.epsilon0, "xe_tilde")
        lines += [
            f"bound_radius = {radius:.6g}",
            f"beta_min = {ctrl.min_gain:.6g}",
            f"beta_bar = {ctrl.beta_bar:g}",
            f"u_max = {ctrl.u_max:.6g}",
            f"entry_time(bound_radius) = {_fmt_time(t_r)}",
            f"entry_time(0.3) = {_fmt_time(t_03)} (reported: about {REPORTED_ENTRY_TIME:g} s)",
            f"entry_time_measured(epsilon0={ctrl.epsilon0:g}) = {_fmt_time(t_m)}",
            f"beta_hat = {ctrl.beta_hat:.6g} (computed from its definition; reported value {REPORTED_BETA_HAT})",
        ]
    elif "k" in trace.extras:
        k = trace.extras["k"]
        lines += [f"gain_initial = {k[0]:.6g}", f"gain_final = {k[-1]:.6g}"]
        lam = ctrl.lam
        lines.append(f"entry_time_measured(lambda+0.05={lam + 0.05:g}) = {_fmt_time(trace.entry_time(lam + 0.05, 'xe_tilde'))}")
    lines += [
        f"max_abs_x_e_final_10pct = {np.max(np.abs(trace.x_e[int(0.9 * (len(trace.t) - 1)):])):.6g}",
        f"max_abs_u = {np.max(np.abs(trace.u)):.6g}",
        "assumptions = all runtime bound checks passed",
    ]
    return "\n".join(lines) + "\n"


def _fmt_time(t) -> str:
    return "never" if t is None else f"{t:.4f} s"


def write_artifacts(trace: SimTrace, cfg, out_dir: Path, stem: str = "trace") -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [write_trace_csv(trace, out_dir / f"{stem}.csv")]
    guides = []
    radius = trace.bound_radius
    if radius is not None:
        guides = [(radius, f"+{radius:.3g}"), (-radius, f"-{radius:.3g}")]
    charts = {
        "x_e": (svg_line_chart(trace.t, {"x_e": trace.x_e}, "true tracking error", ylabel="x_e", guides=guides)),
        "xe_tilde": svg_line_chart(trace.t, {"x~_e": trace.xe_tilde}, "measured tracking error", ylabel="x~_e"),
        "u": svg_line_chart(trace.t, {"u": trace.u}, "control input", ylabel="u"),
    }
    for name, svg in charts.items():
        p = out_dir / f"{stem}_{name}.svg"
        p.write_text(svg, encoding="utf-8", newline="\n")
        paths.append(p)
    p = out_dir / f"{stem}_summary.txt"
    p.write_text(summary_text(trace, cfg), encoding="utf-8", newline="\n")
    paths.append(p)
    return paths


def _overrides(sim, args):
    kw = {}
    if args.step is not None:
        kw["h"] = args.step
    if args.horizon is not None:
        kw["T"] = args.horizon
    if args.negate_u:
        kw["negate_u"] = True
    return replace(sim, **kw) if kw else sim


def cmd_simulate(args) -> int:
    path = args.config or bundled_config_path("paper_fig5.cfg")
    cfg = load_config(path)
    sim = _overrides(cfg.sim, args)
    trace = simulate(sim)
    out = Path(args.out)
    paths = write_artifacts(trace, replace(cfg, sim=sim), out)
    sys.stdout.write(summary_text(trace, replace(cfg, sim=sim)))
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_solve_fde(args) -> int:
    if not 0 < args.alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if args.N > 10**6:
        raise ValueError("N must not exceed 10**6")
    sol, ref, err = _solve(args)
    cols = {"t": sol.t, "x": sol.states[:, 0]}
    names = ["t", "x"]
    if ref is not None:
        cols["reference"] = ref
        names.append("reference")
    text = trace_csv_text(cols, names)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fde.csv").write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {out / 'fde.csv'}")
    else:
        sys.stdout.write(text)
    if ref is not None:
        print(f"max_error = {err:.6e}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _solve(args):
    zmax = abs(args.lam) * args.T**args.alpha
    if zmax <= 5.0:
        return solve_fde_demo(args.alpha, args.lam, args.x0, args.T, args.N)
    # closed form out of the series range: solve without a reference
    sol = abm_solve(ml_problem(args.alpha, args.lam, args.x0, args.T, args.N))
    return sol, None, math.nan


def cmd_check_stability(args) -> int:
    try:
        A = np.array(ast.literal_eval(args.matrix), dtype=float)
        alpha = float(args.alpha)
        system = LinearFoSystem(A, alpha)
    except (ValueError, SyntaxError, TypeError) as exc:
        print(f"error: cannot parse system: {exc}", file=sys.stderr)
        return EXIT_ERROR
    verdict = check_linear_fo_stability(system)
    print(verdict)
    return EXIT_OK if verdict.stable else EXIT_UNSTABLE


def cmd_reproduce(args) -> int:
    runner = RUNNERS[args.figure]
    kw = {} if args.figure == "order" else {"h": args.step, "T": args.horizon, "negate_u": True if args.negate_u else None}
    report = runner(**kw)
    sys.stdout.write(report.text())
    if args.out:
        out = Path(args.out)
        for name, trace in report.traces.items():
            if isinstance(trace, SimTrace):
                write_artifacts(trace, load_config(bundled_config_path("paper_fig5.cfg")), out, name)
    return EXIT_OK if report.passed else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fogpss", description="Fractional-order tracking control experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--step", type=float, default=None, metavar="H", help="override the step size")
        p.add_argument("--horizon", type=float, default=None, metavar="T", help="override the horizon")
        p.add_argument("--negate-u", action="store_true", help="apply the control with the opposite sign")

    p = sub.add_parser("simulate", help="run a closed-loop experiment from a config file")
    p.add_argument("--config", default=None, help="experiment file (default: bundled paper_fig5.cfg)")
    run_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("solve-fde", help="solve D^alpha x = lambda x with the predictor-corrector scheme")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lam", "--lambda", dest="lam", type=float, default=-1.0)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--out", default=None, help="output directory (default: CSV to stdout)")
    p.set_defaults(func=cmd_solve_fde)

    p = sub.add_parser("check-stability", help="eigenvalue-argument test for D^alpha x = A x")
    p.add_argument("matrix", help="matrix literal such as '[[0,1],[-1,0]]'")
    p.add_argument("alpha")
    p.set_defaults(func=cmd_check_stability)

    p = sub.add_parser("reproduce", help="run a named experiment and print criterion verdicts")
    p.add_argument("figure", choices=sorted(RUNNERS))
    run_flags(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.out is None:
        args.out = "out"
    try:
        return args.func(args)
    except GainConditionError as exc:
        print(f"error: invalid gains: {exc}", file=sys.stderr)
    except AssumptionViolation as exc:
        print(f"error: assumption violated: {exc}", file=sys.stderr)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
    except BlowUpError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
