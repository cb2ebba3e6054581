"""Command-line front end.

Subcommands:
  r0         print the reproduction-index report for a configuration
  simulate   run a scenario and write CSV artifacts
  periodic   compute the positive periodic state (or extinction certificate)
  sweep      scan one parameter axis, locating index = 1 crossings
  reproduce  run one of the built-in benchmark scenarios

Exit codes: 0 on success, 2 on configuration/usage errors, 1 on runtime
failures.  Sweep parallelism honours the EVODOM_WORKERS environment
variable.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, EvodomError
from .experiments import (
    PRESET_ALIASES,
    get_preset,
    load_config,
    run_scenario,
    sweep,
    write_csv,
)
from .periodic import ExtinctionCertificate, period_map_fixed_point
from .engine import initial_condition
from .spectral import compute_index


def _fmt(value):
    if value is None:
        return "undefined-positive-growth"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _load(path):
    try:
        return load_config(path)
    except FileNotFoundError:
        print(f"error: no such config file: {path}", file=sys.stderr)
        raise SystemExit(2)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _cmd_r0(args):
    scenario = _load(args.config)
    report = compute_index(scenario.params, scenario.rho, scenario.pulse)
    print(f"scenario = {scenario.name}")
    for key, value in report.as_dict().items():
        print(f"{key} = {_fmt(value)}")
    print(f"index = {_fmt(report.index)}")
    return 0


def _cmd_simulate(args):
    scenario = _load(args.config)
    record = run_scenario(scenario, out_dir=args.out, surface_plot=args.plot)
    print(f"{record.scenario}: classification = {record.classification} "
          f"after {record.periods_run} periods "
          f"(index = {_fmt(record.report.index)})")
    return 0


def _cmd_periodic(args):
    scenario = _load(args.config)
    state = initial_condition(scenario.v0_modes, scenario.grid,
                              scenario.params.l0)
    sol = period_map_fixed_point(scenario.params, scenario.rho, scenario.pulse,
                                 scenario.grid, state)
    os.makedirs(args.out, exist_ok=True)
    if isinstance(sol, ExtinctionCertificate):
        path = os.path.join(args.out, "certificate.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("outcome = extinction\n")
            fh.write(f"periods = {sol.periods}\n")
            fh.write(f"residual = {_fmt(sol.residual)}\n")
            fh.write(f"final_sup = {_fmt(sol.final_sup)}\n")
        print(f"{scenario.name}: extinction certificate after {sol.periods} "
              f"periods (final sup {_fmt(sol.final_sup)})")
        return 0
    y = scenario.grid.y
    write_csv(os.path.join(args.out, "orbit.csv"), ("t", "y", "v"),
              ((float(sol.orbit.times[k]), float(yy), float(vv))
               for k in range(len(sol.orbit.times))
               for yy, vv in zip(y, sol.orbit.values[k])))
    print(f"{scenario.name}: periodic state found after {sol.periods} periods "
          f"(residual {_fmt(sol.residual)})")
    return 0


def _cmd_sweep(args):
    scenario = _load(args.config)
    result = sweep(scenario, args.param, args.start, args.stop, args.points,
                   out_dir=args.out, do_simulate=args.simulate)
    for p in result.points:
        print(f"{p.value:.10g}  index={p.index:.10g}  {p.classification}")
    for c in result.crossings:
        print(f"crossing at {args.param} = {c:.10g}")
    return 0


def _cmd_reproduce(args):
    scenario = get_preset(args.example)
    record = run_scenario(scenario, out_dir=args.out, surface_plot=args.plot)
    status = "ok" if (scenario.expected == record.classification
                      or scenario.expected == "unspecified") else "MISMATCH"
    print(f"{record.scenario}: expected {scenario.expected}, "
          f"got {record.classification} [{status}]")
    return 0 if status == "ok" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evodom",
        description="Pulsed logistic population dynamics on an evolving interval",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("r0", help="print the reproduction-index report")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_r0)

    p = sub.add_parser("simulate", help="run a scenario and write artifacts")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true",
                   help="also write a vector-graphics surface plot")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("periodic", help="compute the positive periodic state")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_periodic)

    p = sub.add_parser("sweep", help="scan one parameter axis")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--simulate", action="store_true",
                   help="back each point with a full simulation")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reproduce", help="run a built-in benchmark scenario")
    p.add_argument("--example", required=True,
                   choices=sorted(PRESET_ALIASES) + sorted(
                       set(PRESET_ALIASES.values())))
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvodomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
