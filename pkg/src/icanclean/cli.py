"""Command-line interface: ``icanclean clean | synth | bench``.

Exit codes: 0 success; 2 bad arguments (usage and value errors); 3 input
file errors (missing, unreadable, or malformed CSV); 4 numerical or
precondition failures during processing, including output write failures.
Every failure prints a message to standard error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .cleaning import CleanConfig, ComponentSource, clean_batch, clean_sliding
from .errors import IcanCleanError, ParseError
from .io import atomic_output, read_recording, write_recording
from .synth import BenchmarkSpec, ScenarioSpec, benchmark_throughput, generate_scenario

__all__ = ["build_parser", "format_clean_report", "main", "run"]


def _threshold(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _nonnegative_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="icanclean",
        description="Remove noise shared with reference channels from multichannel CSV recordings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    clean = sub.add_parser("clean", help="clean a recording against reference noise channels")
    clean.add_argument("--data", required=True, help="corrupted data CSV")
    clean.add_argument("--noise", required=True, help="reference noise CSV, time-aligned with --data")
    clean.add_argument("--out", required=True, help="cleaned output CSV")
    clean.add_argument("--thresh", required=True, type=_threshold,
                       help="squared-correlation removal threshold in [0, 1]")
    clean.add_argument("--source", choices=["u", "v"], default="u",
                       help="variates to regress out: data-side (u) or noise-side (v)")
    clean.add_argument("--window", type=_nonnegative_int, default=0,
                       help="sliding window length in samples; 0 cleans the whole record")
    clean.add_argument("--hop", type=_positive_int, default=None,
                       help="samples between window starts (default: window length)")
    clean.add_argument("--report", default=None, help="write a diagnostics report to this path")
    clean.set_defaults(func=cmd_clean)

    synth = sub.add_parser("synth", help="generate a synthetic scenario with known ground truth")
    synth.add_argument("--out-data", required=True, help="corrupted data CSV to write")
    synth.add_argument("--out-noise", required=True, help="reference noise CSV to write")
    synth.add_argument("--out-truth", required=True, help="ground-truth CSV to write")
    synth.add_argument("--samples", type=_positive_int, default=20000)
    synth.add_argument("--data-channels", type=_positive_int, default=64)
    synth.add_argument("--noise-channels", type=_positive_int, default=8)
    synth.add_argument("--signal-sources", type=_positive_int, default=4)
    synth.add_argument("--noise-sources", type=_positive_int, default=8)
    synth.add_argument("--rate", type=_positive_float, default=500.0, help="sampling rate in Hz")
    synth.add_argument("--ref-noise-level", type=_nonnegative_float, default=0.0,
                       help="white sensor noise level on the reference channels")
    synth.add_argument("--seed", type=int, default=0)
    synth.set_defaults(func=cmd_synth)

    bench = sub.add_parser("bench", help="measure cleaning throughput on a synthetic workload")
    bench.add_argument("--samples", type=_positive_int, default=100000)
    bench.add_argument("--data-channels", type=_positive_int, default=64)
    bench.add_argument("--noise-channels", type=_positive_int, default=8)
    bench.add_argument("--window", type=_nonnegative_int, default=0)
    bench.add_argument("--hop", type=_positive_int, default=None)
    bench.add_argument("--repetitions", type=_positive_int, default=3)
    bench.add_argument("--thresh", type=_threshold, default=0.5)
    bench.add_argument("--rate", type=_positive_float, default=500.0)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)

    return parser


def _vector(values):
    return " ".join(f"{v:.12g}" for v in np.asarray(values).ravel())


def format_clean_report(mode, report, elapsed_seconds):
    """Stable key-value report schema; one ``key: value`` pair per line."""
    lines = [
        f"mode: {mode}",
        f"n_comp: {report.n_comp}",
        f"n_bad: {report.n_bad}",
        f"bad_indices: {_vector(report.bad_indices)}",
        f"correlations: {_vector(report.correlations)}",
        f"variance_removed_per_channel: {_vector(report.variance_removed_per_channel)}",
        f"windows_processed: {report.windows_processed}",
        f"elapsed_seconds: {elapsed_seconds:.6f}",
    ]
    return "\n".join(lines) + "\n"


def _write_text_atomic(path, text):
    with atomic_output(path) as fh:
        fh.write(text)


def cmd_clean(args):
    start = time.perf_counter()
    x = read_recording(args.data)
    y = read_recording(args.noise)
    config = CleanConfig(
        thresh=args.thresh,
        source=ComponentSource(args.source),
        window_len=args.window,
        window_hop=args.hop,
    )
    if args.window > 0:
        mode = "sliding"
        cleaned, report = clean_sliding(x, y, config)
    else:
        mode = "batch"
        cleaned, report = clean_batch(x, y, config)
    elapsed = time.perf_counter() - start
    write_recording(cleaned, args.out)
    if args.report:
        _write_text_atomic(args.report, format_clean_report(mode, report, elapsed))
    print(
        f"cleaned {x.n_samples} samples x {x.n_channels} channels: "
        f"removed {report.n_bad} of {report.n_comp} components "
        f"in {report.windows_processed} window(s)"
    )
    return 0


def cmd_synth(args):
    spec = ScenarioSpec(
        n_samples=args.samples,
        n_data_channels=args.data_channels,
        n_noise_channels=args.noise_channels,
        n_signal_sources=args.signal_sources,
        n_noise_sources=args.noise_sources,
        sampling_rate_hz=args.rate,
        ref_sensor_noise_level=args.ref_noise_level,
        seed=args.seed,
    )
    x, y, truth = generate_scenario(spec)
    write_recording(x, args.out_data)
    write_recording(y, args.out_noise)
    write_recording(truth, args.out_truth)
    print(f"wrote {args.out_data}, {args.out_noise}, {args.out_truth}")
    return 0


def cmd_bench(args):
    spec = BenchmarkSpec(
        n_samples=args.samples,
        n_data_channels=args.data_channels,
        n_noise_channels=args.noise_channels,
        window_len=args.window,
        window_hop=args.hop,
        repetitions=args.repetitions,
        thresh=args.thresh,
        sampling_rate_hz=args.rate,
        seed=args.seed,
    )
    report = benchmark_throughput(spec)
    sys.stdout.write(report.format())
    return 0


def _validate_args(parser, args):
    if args.command in ("clean", "bench") and args.hop is not None:
        if args.window == 0:
            parser.error("--hop requires --window > 0")
        if args.hop > args.window:
            parser.error(f"--hop must not exceed --window ({args.hop} > {args.window})")
    if args.command == "synth" and args.samples < 2:
        parser.error("--samples must be >= 2 to encode a sampling rate")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_args(parser, args)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"icanclean: error: {exc}", file=sys.stderr)
        return 3
    except IcanCleanError as exc:
        print(f"icanclean: error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        target = exc.filename or ""
        print(f"icanclean: error: {target}: {exc.strerror or exc}", file=sys.stderr)
        return 4


def run():
    sys.exit(main())
