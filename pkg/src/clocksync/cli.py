"""Command line interface.

Subcommands:
    simulate <scenario.yaml> --out trace.csv
    sweep <scenario.yaml> --steps 2,10,20,50,100 --seeds N --out-dir DIR
    analyze-ptp <logfile> --out records.csv
    report <trace.csv ...> [--threshold 1e-6]

Exit code 0 on success; on failure a one-line "error: <Kind>: <detail>"
goes to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import controller, scenario as scenario_mod, trace_io
from .controller import NotConverged, Phase, SyncSchedule
from .errors import ClockSyncError


def _load_scenario(path: str, seed_override: int | None):
    sc = scenario_mod.parse_scenario(Path(path).read_text())
    if seed_override is not None:
        sc = replace(sc, seed=seed_override)
    return sc


def _run_to_csv(sc, schedule, out_path: Path) -> controller.SyncTrace:
    rng = np.random.default_rng(sc.seed)
    trace = controller.run_sync(sc, schedule, rng)
    with open(out_path, "w", newline="") as fh:
        trace_io.write_trace_csv(trace, fh)
    return trace


def cmd_simulate(args) -> int:
    sc = _load_scenario(args.scenario, args.seed)
    trace = _run_to_csv(sc, sc.schedule, Path(args.out))
    if not args.quiet:
        conv = controller.convergence_time(trace, sc.convergence_threshold)
        conv_txt = "not converged" if isinstance(conv, NotConverged) else f"{conv:g} s"
        print(f"{sc.scenario_id}: {len(trace.reports)} steps, "
              f"convergence at {conv_txt} (|offset| <= {sc.convergence_threshold:g} s)")
    return 0


def cmd_sweep(args) -> int:
    sc = _load_scenario(args.scenario, args.seed)
    steps = [float(s) for s in args.steps.split(",") if s]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for step in steps:
        for k in range(args.seeds):
            seed = sc.seed + k
            run_sc = replace(sc, seed=seed)
            schedule = SyncSchedule(
                phases=(Phase(step, args.n_steps),),
                exchanges_per_step=sc.schedule.exchanges_per_step,
                warmup_steps=sc.schedule.warmup_steps,
                correction_mode=sc.schedule.correction_mode,
            )
            out = out_dir / f"{sc.scenario_id}_step{step:g}_seed{seed}.csv"
            _run_to_csv(run_sc, schedule, out)
            if not args.quiet:
                print(f"wrote {out}")
    return 0


def cmd_analyze_ptp(args) -> int:
    with open(args.logfile, errors="replace") as fh:
        records, skipped = trace_io.parse_ptp4l_log(fh)
    summary = trace_io.analyze_ptp_log(records)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            trace_io.write_ptp_csv(records, fh)
    if not args.quiet:
        corr = "undefined" if summary.correlation is None else f"{summary.correlation:.4f}"
        print(f"{summary.n} records ({skipped} lines skipped), "
              f"offset std {summary.offset_std_ns:.1f} ns, "
              f"freq std {summary.freq_std_ppb:.1f} ppb, "
              f"corr(offset, freq*dt) = {corr}")
    return 0


def cmd_report(args) -> int:
    for path in args.csv:
        with open(path) as fh:
            rows = trace_io.read_trace_csv(fh)
        trace = trace_io.trace_from_rows(rows)
        conv = controller.convergence_time(trace, args.threshold)
        conv_txt = "not converged" if isinstance(conv, NotConverged) else f"{conv:g} s"
        corrected = [r for r in trace.reports if r.correction_active]
        tail = corrected[len(corrected) // 2:]
        std = float(np.std([r.offset_after for r in tail])) if tail else float("nan")
        try:
            corr = controller.offset_freq_correlation(trace)
            corr_txt = "undefined" if corr is None else f"{corr:.4f}"
        except ClockSyncError:
            corr_txt = "n/a"
        print(f"{path}: convergence {conv_txt}, steady-state offset std {std:.3e} s, "
              f"corr(offset, freq*dt) {corr_txt}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clocksync")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its trace CSV")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a step-size/seed sweep")
    p.add_argument("scenario")
    p.add_argument("--steps", default="2,10,20,50,100",
                   help="comma-separated step sizes in seconds")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--n-steps", type=int, default=13,
                   help="steps per run (includes warmup)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze-ptp", help="summarize a ptp4l log")
    p.add_argument("logfile")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze_ptp)

    p = sub.add_parser("report", help="summarize trace CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClockSyncError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: OSError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
