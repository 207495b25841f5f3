"""Command-line interface.

Subcommands: effective, predict-speed, simulate, sweep, entropy, compare.
All consume the YAML config formats documented in the README.  Exit code
is 0 on success and 2 on any diagnosed error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness, snapshot_io
from .errors import ShocklabError
from .homogenize import effective_parameters
from .rh import predict_speeds


def _print_kv(pairs, as_json: bool) -> None:
    if as_json:
        print(json.dumps(dict(pairs), sort_keys=True, indent=2))
    else:
        width = max(len(k) for k, _ in pairs)
        for key, value in pairs:
            if isinstance(value, float):
                print(f"{key:<{width}}  {value:.10g}")
            else:
                print(f"{key:<{width}}  {value}")


def cmd_effective(args) -> int:
    config = harness.load_experiment(args.config)
    med = effective_parameters(config.medium)
    _print_kv([
        ("K_bar", med.K_bar),
        ("rho_m", med.rho_m),
        ("rho_h", med.rho_h),
        ("theta_deg", med.theta),
        ("rho_bar", med.rho_bar),
        ("c_eff", med.c_eff),
    ], args.json)
    return 0


def cmd_predict_speed(args) -> int:
    config = harness.load_experiment(args.config)
    pred = predict_speeds(config.medium, config.law, config.sigma_l,
                          config.sigma_r, config.u_r)
    keys = ("s_eff", "u_l", "c_h", "c_m", "c_eff")
    _print_kv([(k, pred[k]) for k in keys], args.json)
    return 0


def cmd_simulate(args) -> int:
    config = harness.load_experiment(args.config)
    on_final = None
    if args.snapshots:
        os.makedirs(args.snapshots, exist_ok=True)
        writer = (snapshot_io.write_snapshot_bin if args.binary
                  else snapshot_io.write_snapshot_csv)
        ext = "bin" if args.binary else "csv"
        stem = harness.experiment_id(config)
        path = os.path.join(args.snapshots, f"final_{stem}.{ext}")

        def on_final(state, t):
            writer(path, t, state.eps_i, state.mom_x_i, state.mom_y_i,
                   state.grid.dx, state.grid.dy)
            print(f"wrote {path}", file=sys.stderr)

    record = harness.run_experiment(config, on_final=on_final)
    pairs = [
        ("config_id", record.config_id),
        ("s_predicted", record.s_predicted),
        ("s_measured", record.s_measured),
        ("rel_error", record.rel_error),
        ("entropy_loss", record.entropy_loss),
        ("front_found", str(record.front_found)),
    ]
    _print_kv(pairs, args.json)
    return 0


def cmd_sweep(args) -> int:
    sweep = harness.load_sweep(args.config)
    configs = harness.expand_sweep(sweep)
    print(f"sweep of {len(configs)} experiments", file=sys.stderr)
    records = harness.run_sweep(configs, jobs=args.jobs,
                                log=lambda m: print(m, file=sys.stderr))
    paths = harness.emit_outputs(records, args.out)
    print(f"wrote {len(paths)} files under {args.out}", file=sys.stderr)
    return 0


def cmd_entropy(args) -> int:
    config = harness.load_experiment(args.config)
    resolutions = [int(v) for v in args.resolutions.split(",")]
    traces, losses, label = harness.run_entropy_study(
        config, resolutions, t_probe=args.t_probe)
    pairs = [(f"loss@res{res}", losses[res]) for res in sorted(losses)]
    pairs.append(("classification", label))
    _print_kv(pairs, args.json)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for res, trace in traces.items():
            path = os.path.join(args.out, f"entropy_res{res}.csv")
            with open(path, "w", newline="") as fh:
                fh.write("t,eta,eta_normalized\n")
                for t, e, n in zip(trace.times, trace.eta, trace.normalized):
                    fh.write(f"{t:.12g},{e:.12g},{n:.12g}\n")
        print(f"wrote traces under {args.out}", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    rows = harness.read_speeds_csv(args.records)
    errs = [r["rel_error"] for r in rows if not math.isnan(r["rel_error"])]
    print(f"records          {len(rows)}")
    print(f"measured         {len(errs)}")
    if errs:
        print(f"median rel error {np.median(errs):.4%}")
        print(f"max rel error    {np.max(errs):.4%}")
    by_theta: dict[float, list[float]] = {}
    for r in rows:
        if not math.isnan(r["rel_error"]):
            by_theta.setdefault(r["theta_deg"], []).append(r["rel_error"])
    for theta in sorted(by_theta):
        e = by_theta[theta]
        print(f"theta {theta:5.1f}      n={len(e):<4d} median={np.median(e):.4%} "
              f"max={np.max(e):.4%}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shocklab",
        description="Shock-speed prediction and measurement in periodic media")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("effective", help="print homogenized parameters")
    p.add_argument("config")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_effective)

    p = sub.add_parser("predict-speed", help="print predicted shock speed")
    p.add_argument("config")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_predict_speed)

    p = sub.add_parser("simulate", help="run one experiment")
    p.add_argument("config")
    p.add_argument("--snapshots", metavar="DIR")
    p.add_argument("--binary", action="store_true",
                   help="binary snapshot format instead of CSV")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("config")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("entropy", help="entropy refinement study")
    p.add_argument("config")
    p.add_argument("--resolutions", required=True,
                   help="comma-separated cells-per-unit list, e.g. 32,64")
    p.add_argument("--t-probe", type=float, default=None)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_entropy)

    p = sub.add_parser("compare", help="summarize a speeds.csv")
    p.add_argument("records")
    p.set_defaults(fn=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ShocklabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
