"""Command-line harness: serial reference, parareal sweeps, summary tables."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import config as configmod
from . import golden
from .exceptions import ConfigError, NonConvergenceError, TempoloopError
from .parareal import VARIANTS, run
from .report import best_process_counts, reference_row, rows_from_result, summary_csv, sweep_report
from .twoscale import TrajectorySegment, serial_reference, write_trajectory_csv

logger = logging.getLogger("tempoloop")

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3

GOLDEN_TOLERANCE = 1e-12


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="tempoloop",
        description="Parallel-in-time two-scale plaque growth experiments.",
    )
    ap.add_argument("--config", type=Path, help="JSON experiment configuration")
    ap.add_argument("--variant", choices=VARIANTS + ("all",), default=None,
                    help="coarse propagator variant (default: the config's list)")
    ap.add_argument("--processes", type=_int_list, help="comma-separated process counts P")
    ap.add_argument("--fixed-iterations", type=_int_list,
                    help="run exactly this many iterations (one value, or one per P)")
    ap.add_argument("--reference-only", action="store_true", help="only run the serial reference")
    ap.add_argument("--check-golden", action="store_true",
                    help="recompute the serial end value and compare with the stored golden value")
    ap.add_argument("--threads", type=int, default=None,
                    help="threads for the fine sweeps (fallback: $TEMPOLOOP_THREADS, else 1)")
    ap.add_argument("--output-dir", type=Path, help="override the config's output directory")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _resolve_threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("TEMPOLOOP_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"TEMPOLOOP_THREADS must be an integer, got {env!r}") from None
    return 1


def _load_config(args):
    cfg = configmod.load(args.config) if args.config else configmod.ExperimentConfig()
    d = cfg.to_dict()
    if args.variant is not None:
        d["variants"] = list(VARIANTS) if args.variant == "all" else [args.variant]
    if args.processes is not None:
        d["process_counts"] = args.processes
        if args.fixed_iterations is None and d["fixed_iterations"] is not None and len(d["fixed_iterations"]) > 1:
            d["fixed_iterations"] = None
    if args.fixed_iterations is not None:
        d["fixed_iterations"] = args.fixed_iterations
    if args.output_dir is not None:
        d["output_dir"] = str(args.output_dir)
    return configmod.ExperimentConfig.from_dict(d)


def check_golden(cfg, reference):
    stored = golden.load()["serial_c_end"]
    rel = abs(reference.c_end - stored) / abs(stored)
    ok = rel <= GOLDEN_TOLERANCE
    print(f"golden serial c*(T_end): stored={golden.format_value(stored)} "
          f"computed={golden.format_value(reference.c_end)} rel_diff={rel:.3e} "
          f"{'PASS' if ok else 'FAIL'}")
    return ok


def _fine_trajectory(result):
    segs = result.iterate.fine_segments
    traj = TrajectorySegment(times=[segs[0].times[0]], c_values=[segs[0].c_values[0]],
                             micro_states=[segs[0].micro_states[0]])
    for seg in segs:
        traj.times.extend(seg.times[1:])
        traj.c_values.extend(seg.c_values[1:])
        traj.gamma_values.extend(seg.gamma_values)
        traj.cycles.extend(seg.cycles)
        traj.micro_states.extend(seg.micro_states[1:])
    return traj


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        threads = _resolve_threads(args.threads)
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    micro = cfg.micro()
    out = Path(cfg.output_dir)
    try:
        reference = serial_reference(micro, cfg.T_end_days, cfg.dt_fine_days, cfg.c0)
    except NonConvergenceError as exc:
        print(f"error: {exc.add_context(variant='reference', P=1, k=0)}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except TempoloopError as exc:
        print(f"error: {exc.add_context(variant='reference', P=1, k=0)}", file=sys.stderr)
        return EXIT_FAILURE

    if args.check_golden:
        return EXIT_OK if check_golden(cfg, reference) else EXIT_FAILURE

    out.mkdir(parents=True, exist_ok=True)
    rows = [reference_row(reference)]
    if cfg.emit_trajectories:
        write_trajectory_csv(reference, out / "trajectory_reference.csv")

    if args.reference_only:
        (out / "summary.csv").write_text(summary_csv(rows))
        print(f"reference: c*(T_end)={reference.c_end!r} micro problems={reference.micro_problems}")
        return EXIT_OK

    results = []
    failures = []
    status = EXIT_OK
    for variant in cfg.variants:
        for P in cfg.process_counts:
            pcfg = cfg.parareal_config(P, variant, threads=threads)
            try:
                result = run(pcfg, micro, reference=reference)
            except NonConvergenceError as exc:
                failures.append(str(exc))
                status = EXIT_NONCONVERGENCE
                continue
            except TempoloopError as exc:
                failures.append(str(exc))
                if status == EXIT_OK:
                    status = EXIT_FAILURE
                continue
            if not result.converged:
                failures.append(f"parareal did not meet eps_par={pcfg.eps_par:g} within "
                                f"{pcfg.max_iterations} iterations [variant={variant}, P={P}, k={result.k_par}]")
                status = EXIT_NONCONVERGENCE
            results.append(result)
            rows.extend(rows_from_result(result))
            if cfg.emit_trajectories:
                write_trajectory_csv(_fine_trajectory(result), out / f"trajectory_{variant}_P{P}.csv")

    (out / "summary.csv").write_text(summary_csv(rows))
    if results:
        (out / "report.txt").write_text(sweep_report(results, reference))
        print(sweep_report(results, reference))
        for variant in cfg.variants:
            rs = [r for r in results if r.config.variant == variant]
            if rs:
                best, cost = best_process_counts(rs)
                print(f"best #mp for {variant}: P={','.join(map(str, best))} (#mp={cost})")
    for msg in failures:
        print(f"error: {msg}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
