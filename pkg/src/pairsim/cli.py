"""Command-line interface.

Subcommands::

    pairsim preset  [--out FILE]
    pairsim run     --config PATH [--trials N] [--seed S] [--out DIR]
                    [--set key=value ...] [--workers N] [--keep-events]
    pairsim sweep   --config PATH --param NAME --values v1,v2,...
                    [--trials N] [--seed S] [--out DIR] [--set ...] [--workers N]
    pairsim oracle  --config PATH [--n-max K] [--out DIR] [--set ...]
    pairsim compare --config PATH [--trials N] [--seed S] [--n-max K]
                    [--out DIR] [--set ...] [--workers N]

Exit codes: 0 success, 2 configuration or usage error, 3 I/O error,
1 any other failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .analysis import render_report
from .config import ConfigError, ExperimentConfig, ensure_valid, parse_config, \
    reference_preset, render_config
from .engine import (export_run, export_sweep, render_run_report, simulate_run,
                     sweep)
from .oracle import DEFAULT_N_MAX, TruncationError, compare, oracle_report

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _load_config(args) -> ExperimentConfig:
    text = Path(args.config).read_text()
    config = parse_config(text)
    if getattr(args, "overrides", None):
        merged = render_config(config).splitlines()
        keyed = {line.split("=")[0].strip(): line for line in merged if "=" in line}
        for override in args.overrides:
            if "=" not in override:
                raise ConfigError(f"--set expects key=value, got {override!r}")
            key, _, value = override.partition("=")
            keyed[key.strip()] = f"{key.strip()} = {value.strip()}"
        config = parse_config("\n".join(keyed.values()))
    return ensure_valid(config)


def _cmd_preset(args) -> int:
    text = render_config(reference_preset())
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_run(args) -> int:
    config = _load_config(args)
    result = simulate_run(config, trials=args.trials, seed=args.seed,
                          workers=args.workers)
    sys.stdout.write(render_run_report(result))
    if args.out:
        manifest = export_run(result, args.out, keep_events=args.keep_events)
        print(f"# exported {len(manifest.outputs)} files to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    raw_values = [v for v in args.values.split(",") if v.strip()]
    if args.param not in {f.name for f in fields(ExperimentConfig)}:
        raise ConfigError(f"unknown config parameter {args.param!r}")
    caster = int if args.param in ("n_trials", "rng_seed", "baseline_peaks") else float
    values = [caster(v) for v in raw_values]
    rows = sweep(config, args.param, values, trials=args.trials, seed=args.seed,
                 workers=args.workers)
    header = ["value", "g11", "g22", "g12", "ratio", "significance", "verdict"]
    print(",".join(header))
    for row in rows:
        print(",".join(str(row[h]) for h in header))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        export_sweep(rows, out / f"sweep_{args.param}.csv")
        print(f"# wrote {out / f'sweep_{args.param}.csv'}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    config = _load_config(args)
    prediction = oracle_report(config, n_max=args.n_max)
    sys.stdout.write(render_report(prediction.report, singles=prediction.singles,
                                   trials=0))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "oracle_patterns.csv", "w") as fh:
            fh.write("pattern_a,pattern_b,pattern_c,pattern_d,probability\n")
            for mask in range(16):
                bits = [(mask >> bit) & 1 for bit in range(4)]
                fh.write(",".join(str(b) for b in bits)
                         + f",{prediction.pattern.probs[mask]!r}\n")
        (out / "oracle_report.txt").write_text(
            render_report(prediction.report, singles=prediction.singles, trials=0))
        print(f"# wrote oracle report and patterns to {out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load_config(args)
    prediction = oracle_report(config, n_max=args.n_max)
    result = simulate_run(config, trials=args.trials, seed=args.seed,
                          workers=args.workers)
    mc_g = {"g11": result.g["11"], "g22": result.g["22"], "g12": result.g["12"]}
    rows = compare(result.pattern_counts, mc_g, prediction, result.trials)
    print("quantity,mc,oracle,sigma_mc,z,flagged")
    for row in rows:
        print(f"{row.quantity},{row.mc_value!r},{row.oracle_value!r},"
              f"{row.sigma!r},{row.z!r},{row.flagged}")
    flagged = [row for row in rows if row.flagged]
    print(f"# {len(flagged)} of {len(rows)} quantities flagged (|z| > 4)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "compare.csv", "w") as fh:
            fh.write("quantity,mc,oracle,sigma_mc,z,flagged\n")
            for row in rows:
                fh.write(f"{row.quantity},{row.mc_value!r},{row.oracle_value!r},"
                         f"{row.sigma!r},{row.z!r},{row.flagged}\n")
        print(f"# wrote {out / 'compare.csv'}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, trials: bool = True) -> None:
    parser.add_argument("--config", required=True, help="config file path")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key (repeatable)")
    if trials:
        parser.add_argument("--trials", type=int, default=None,
                            help="override n_trials")
        parser.add_argument("--seed", type=int, default=None,
                            help="override rng_seed")
        parser.add_argument("--workers", type=int, default=1,
                            help="parallel workers (results identical for any count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairsim",
        description="Monte Carlo simulator for time-delayed photon-pair "
                    "coincidence experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_preset = sub.add_parser("preset", help="print the reference configuration")
    p_preset.add_argument("--out", default=None, help="write to file instead")
    p_preset.set_defaults(func=_cmd_preset)

    p_run = sub.add_parser("run", help="simulate one run and report correlations")
    _add_common(p_run)
    p_run.add_argument("--out", default=None, help="export directory")
    p_run.add_argument("--keep-events", action="store_true",
                       help="also persist raw click events")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="repeat a run over parameter values")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True, help="config field to sweep")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    p_sweep.add_argument("--out", default=None, help="export directory")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="analytic prediction for a config")
    _add_common(p_oracle, trials=False)
    p_oracle.add_argument("--n-max", type=int, default=DEFAULT_N_MAX,
                          help="source truncation")
    p_oracle.add_argument("--out", default=None, help="export directory")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_compare = sub.add_parser("compare",
                               help="simulate and z-score against the oracle")
    _add_common(p_compare)
    p_compare.add_argument("--n-max", type=int, default=DEFAULT_N_MAX,
                           help="source truncation")
    p_compare.add_argument("--out", default=None, help="export directory")
    p_compare.set_defaults(func=_cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
