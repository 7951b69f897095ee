"""Command-line surface: one subcommand per pipeline stage.

Data goes to the output stream as CSV (LF line endings, ``.`` decimal
point, floats at 17 significant digits so they parse back bit-exactly);
diagnostics and a final ``status=... command=...`` summary line go to
the error stream.  Exit codes: 0 success, 1 validation problem, 2 I/O
problem.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager

import numpy as np

from .config import ConfigError, load_measurements, parse_config
from .detector import classify, compute_thresholds
from .gaussian import RngStream
from .model import build_emission_matrix
from .simulate import (
    detection_sweep,
    run_monte_carlo,
    simulate_states,
    synthesize_measurements,
)
from .viterbi import viterbi_decode

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage problems are validation problems: exit 1, not argparse's 2.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _fmt_index(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return format(value, ".17g")


@contextmanager
def _open_output(target: str):
    if target in ("-", "stdout"):
        yield sys.stdout
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def _summary(command: str, **fields) -> None:
    parts = [f"status=ok command={command}"]
    parts += [f"{k}={_fmt(v)}" for k, v in fields.items()]
    print(" ".join(parts), file=sys.stderr)


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError(f"{text!r} does not fit in an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _cmd_emission(args) -> int:
    cfg = parse_config(args.config)
    thresholds = compute_thresholds(cfg.params)
    r = build_emission_matrix(cfg.params)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["emitted", "given_neg", "given_zero", "given_pos"])
        for i, symbol in enumerate((-1, 0, 1)):
            writer.writerow([symbol] + [_fmt(float(r[i, j])) for j in range(3)])
    _summary(
        "emission",
        delta_neg_zero=thresholds.delta_neg_zero,
        delta_zero_pos=thresholds.delta_zero_pos,
    )
    return 0


def _cmd_detect(args) -> int:
    cfg = parse_config(args.config)
    series = load_measurements(args.input)
    thresholds = compute_thresholds(cfg.params)
    symbols = classify(series.z_hz, thresholds)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([series.index_name, "z_hz", "x"])
        for idx, z, x in zip(series.index, series.z_hz, symbols):
            writer.writerow([_fmt_index(float(idx)), _fmt(float(z)), int(x)])
    _summary("detect", rows=symbols.size)
    return 0


def _cmd_decode(args) -> int:
    cfg = parse_config(args.config)
    series = load_measurements(args.input)
    model = cfg.model()
    thresholds = compute_thresholds(cfg.params)
    symbols = classify(series.z_hz, thresholds)
    states = viterbi_decode(symbols, model)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([series.index_name, "z_hz", "x", "s_star"])
        for idx, z, x, s in zip(series.index, series.z_hz, symbols, states):
            writer.writerow([_fmt_index(float(idx)), _fmt(float(z)), int(x), int(s)])
    _summary("decode", rows=symbols.size)
    return 0


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    model = cfg.model()
    rng = RngStream(seed, stream_index=0)
    hidden = simulate_states(model, cfg.length, rng)
    z = synthesize_measurements(hidden, cfg.params, rng)
    symbols = classify(z, compute_thresholds(cfg.params))
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["k", "s", "z_hz", "x"])
        for k in range(cfg.length):
            writer.writerow([k + 1, int(hidden[k]), _fmt(float(z[k])), int(symbols[k])])
    _summary("simulate", k=cfg.length, seed=seed)
    return 0


def _cmd_montecarlo(args) -> int:
    cfg = parse_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    trials = args.trials if args.trials is not None else cfg.trials
    model = cfg.model()
    summary = run_monte_carlo(model, cfg.length, trials, seed, threads=args.threads)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["field", "bin", "ht", "va"])
        writer.writerow(["trials", "", summary.trials, summary.trials])
        writer.writerow(["mean_pct", "", _fmt(summary.ht_mean), _fmt(summary.va_mean)])
        writer.writerow(["std_pct", "", _fmt(summary.ht_std), _fmt(summary.va_std)])
        for b in range(summary.histogram_ht.size):
            writer.writerow(
                ["hist", b, int(summary.histogram_ht[b]), int(summary.histogram_va[b])]
            )
    _summary(
        "montecarlo",
        trials=summary.trials,
        k=cfg.length,
        seed=seed,
        threads=args.threads,
        ht_mean=summary.ht_mean,
        va_mean=summary.va_mean,
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if cfg.snr_db_grid is None and cfg.sigma_grid is None:
        raise ConfigError(["'snr_db' or 'sigma_grid' is required for sweep"])
    points = detection_sweep(
        cfg.params, snr_db_grid=cfg.snr_db_grid, sigma_grid=cfg.sigma_grid
    )
    degenerate = 0
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["snr_db", "sigma", "pd_neg", "pd_zero", "pd_pos"])
        for pt in points:
            if pt.detection is None:
                degenerate += 1
                print(f"note: snr_db={_fmt(pt.snr_db)}: {pt.note}", file=sys.stderr)
                row = [_fmt(pt.snr_db), _fmt(pt.sigma)] + ["nan"] * 3
            else:
                row = [_fmt(pt.snr_db), _fmt(pt.sigma)] + [_fmt(v) for v in pt.detection]
            writer.writerow(row)
    _summary("sweep", points=len(points), degenerate=degenerate)
    return 0


def _cmd_predict(args) -> int:
    cfg = parse_config(args.config)
    problems = []
    if cfg.transitions is None:
        problems.append("a [transitions] block is required for predict")
    if cfg.horizon is None:
        problems.append("'horizon' is required for predict")
    if problems:
        raise ConfigError(problems)
    v = np.array(cfg.params.priors)
    with _open_output(args.output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["m", "p_neg", "p_zero", "p_pos"])
        for m in range(cfg.horizon + 1):
            writer.writerow([m] + [_fmt(float(p)) for p in v])
            v = v @ cfg.transitions
    _summary("predict", horizon=cfg.horizon)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="gridhmm",
        description="Hidden-Markov estimation of grid frequency deviation states.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name: str, handler, help_text: str, *, needs_input=False, seeded=False, mc=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument(
            "--output", default="-", help="output CSV path, or '-'/'stdout' (default: stdout)"
        )
        if needs_input:
            p.add_argument("--input", required=True, help="measurement CSV (k,z_hz or timestamp,z_hz)")
        if seeded:
            p.add_argument("--seed", type=_u64, default=None, help="override the config seed")
        if mc:
            p.add_argument(
                "--trials", type=_positive_int, default=None, help="override the config trial count"
            )
            p.add_argument(
                "--threads", type=_positive_int, default=1, help="worker threads (default 1)"
            )
        p.set_defaults(handler=handler)
        return p

    add("emission", _cmd_emission, "print the detector-induced emission matrix and thresholds")
    add("detect", _cmd_detect, "classify measurements into deviation symbols", needs_input=True)
    add(
        "decode",
        _cmd_decode,
        "classify measurements, then decode the most likely state sequence",
        needs_input=True,
    )
    add("simulate", _cmd_simulate, "generate a synthetic state/measurement/symbol trace", seeded=True)
    add(
        "montecarlo",
        _cmd_montecarlo,
        "accuracy statistics of both estimators over independent trials",
        seeded=True,
        mc=True,
    )
    add("sweep", _cmd_sweep, "detection probabilities across noise levels")
    add("predict", _cmd_predict, "state occupancy forecasts for horizons 0..m")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(message)s", level=logging.INFO)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # ConfigError, model/measurement validation, infeasible observations.
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
