"""Command-line front end: rate tables, parameter sweeps and buffer simulations.

Subcommands
  rates     one row per applicable formula cell for a scenario
  sweep     CSV of rates across a parameter grid (figure reproduction)
  simulate  Monte Carlo replications with CI and analytic comparison

A scenario is a JSON file or one of the built-in preset names
(example1, example2a, example2b). Exit codes: 0 success / checks pass,
1 usage or validation error, 2 check failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from .models import (NATS_PER_BIT, Scenario, ScenarioError, DistributionError,
                     load_scenario)
from .presets import PRESETS, get_preset, preset_sweep
from .rates import applicable_reports, sleep_optimize
from .simulator import Policy, POLICY_KINDS, analytic_reference, replicate, simulate

SWEEP_PARAMS = ("beta1", "beta2", "mean_harvest_scale", "alpha")


def _resolve_scenario(name: str) -> Scenario:
    if name in PRESETS:
        return get_preset(name)
    return load_scenario(name)


def _apply_param(sc: Scenario, param: str, value: float) -> Scenario:
    if param == "beta1":
        return sc.with_(beta1=value)
    if param == "beta2":
        return sc.with_(beta2=value)
    if param == "alpha":
        return sc.with_(alpha=value)
    if param == "mean_harvest_scale":
        if value <= 0:
            raise ScenarioError("mean_harvest_scale values must be > 0")
        scaled = tuple(v * value for v in sc.harvest.support)
        return sc.with_(harvest=(scaled, sc.harvest.probs))
    raise ScenarioError(f"unknown sweep parameter {param!r}")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _report_rows(sc: Scenario):
    rows = []
    for rep in applicable_reports(sc):
        rows.append({
            "formula_id": rep.formula_id,
            "csit": rep.scenario.csit,
            "rate_nats": rep.rate.rate_nats,
            "rate_bits": rep.rate.rate_bits,
            "lower_bound_flag": rep.lower_bound_flag,
            "diagnostics": rep.rate.diagnostics,
        })
    return rows


def cmd_rates(args) -> int:
    sc = _resolve_scenario(args.scenario)
    rows = _report_rows(sc)
    unit = args.units
    print(f"{'formula':12} {'csit':8} {'rate_' + unit:>16} {'lower_bound':>12}")
    for r in rows:
        val = r["rate_nats"] if unit == "nats" else r["rate_bits"]
        print(f"{r['formula_id']:12} {r['csit']:8} {_fmt(val):>16} "
              f"{str(r['lower_bound_flag']).lower():>12}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("formula_id,csit,rate_nats,rate_bits,lower_bound_flag\n")
            for r in rows:
                fh.write(f"{r['formula_id']},{r['csit']},{_fmt(r['rate_nats'])},"
                         f"{_fmt(r['rate_bits'])},{str(r['lower_bound_flag']).lower()}\n")
    return 0


def _sweep_point(task):
    sc_dict, param, value, cells = task
    from .models import scenario_from_dict
    sc = _apply_param(scenario_from_dict(sc_dict), param, value)
    rows = []
    for r in _report_rows(sc):
        if cells and r["formula_id"] not in cells:
            continue
        rows.append((value, r["formula_id"], r["csit"], r["rate_nats"],
                     r["rate_bits"], r["lower_bound_flag"]))
    return rows


def cmd_sweep(args) -> int:
    sc = _resolve_scenario(args.scenario)
    param, values = args.param, None
    if args.values:
        values = [float(v) for v in args.values.split(",")]
    if param is None or values is None:
        if args.scenario in PRESETS:
            d_param, d_values = preset_sweep(args.scenario)
            param = param or d_param
            values = values or d_values
        else:
            print("error: --param and --values are required for non-preset "
                  "scenarios", file=sys.stderr)
            return 1
    if param not in SWEEP_PARAMS:
        print(f"error: --param must be one of {SWEEP_PARAMS}", file=sys.stderr)
        return 1
    if not values:
        print("error: empty sweep value list", file=sys.stderr)
        return 1
    cells = set(args.cells.split(",")) if args.cells else None
    from .models import scenario_to_dict
    tasks = [(scenario_to_dict(sc), param, v, cells) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    else:
        chunks = [_sweep_point(t) for t in tasks]
    lines = ["param_value,formula_id,csit,rate_nats,rate_bits,lower_bound_flag"]
    for chunk in chunks:
        for value, fid, csit, nats, bits, lb in chunk:
            lines.append(f"{_fmt(value)},{fid},{csit},{_fmt(nats)},{_fmt(bits)},"
                         f"{str(lb).lower()}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    sc = _resolve_scenario(args.scenario)
    if args.policy not in POLICY_KINDS:
        print(f"error: unknown policy {args.policy!r}; choose from "
              f"{POLICY_KINDS}", file=sys.stderr)
        return 1
    if args.steps < 1:
        print("error: --steps must be >= 1", file=sys.stderr)
        return 1
    policy = Policy(kind=args.policy, delta=args.delta)
    if args.trace:
        simulate(sc, policy, args.steps, args.seed, trace_path=args.trace)
    summary = replicate(sc, policy, args.steps, args.reps, args.seed,
                        jobs=args.jobs)
    analytic = analytic_reference(sc, policy)
    conv = 1.0 if args.units == "nats" else 1.0 / NATS_PER_BIT
    print(f"policy            {args.policy}")
    print(f"analytic_rate     {_fmt(analytic * conv)} {args.units}")
    print(f"empirical_mean    {_fmt(summary.mean_rate * conv)} {args.units}")
    print(f"ci95              [{_fmt(summary.ci_low * conv)}, "
          f"{_fmt(summary.ci_high * conv)}]")
    print(f"mean_truncation   {_fmt(summary.mean_truncation)}")
    print(f"mean_buffer_slope {_fmt(summary.mean_slope)}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("rep,rate_nats\n")
            for i, r in enumerate(summary.rates):
                fh.write(f"{i},{_fmt(r)}\n")
    if args.check:
        ok = summary.ci_low <= analytic <= summary.ci_high
        print(f"check             {'pass' if ok else 'FAIL'}")
        return 0 if ok else 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ehcap",
        description="Capacities and achievable rates for an energy-harvesting "
                    "transmitter on a fading AWGN channel.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario JSON file or preset name "
                            f"({', '.join(sorted(PRESETS))})")
        p.add_argument("--out", default=None, help="write CSV here")
        p.add_argument("--units", choices=("nats", "bits"), default="nats")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("rates", help="rate table for one scenario")
    common(p)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("sweep", help="rates across a parameter grid")
    common(p)
    p.add_argument("--param", choices=SWEEP_PARAMS, default=None)
    p.add_argument("--values", default=None, help="comma-separated values")
    p.add_argument("--cells", default=None,
                   help="comma-separated formula ids to keep")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo buffer simulation")
    common(p)
    p.add_argument("--policy", required=True,
                   help=f"one of {', '.join(POLICY_KINDS)}")
    p.add_argument("--steps", type=int, default=10**5)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--check", action="store_true",
                   help="exit 2 unless the analytic rate lies inside the CI")
    p.add_argument("--trace", default=None,
                   help="dump one per-step trace CSV for the first seed")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ScenarioError, DistributionError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
