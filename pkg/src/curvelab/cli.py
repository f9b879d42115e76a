"""Command line entry point: ``curvelab run <config>`` and ``curvelab list``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ExperimentConfig
from .errors import ConfigError, CurvelabError
from .experiments import available_experiments, load_config, resolve_threads, run
from .report import emit_csv, emit_svg, emit_verdicts_csv

_PLOT_AXES = {
    "decay": ("lambda", "operator_weak_norm"),
    "growth": ("N", "weak_norm_lb"),
    "fn-norms": ("N", "norm"),
    "asymptotics": ("lambda", "remainder"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="curvelab")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--out", type=Path, default=Path("."))
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--threads", type=int, default=None)
    run_p.add_argument("--budget", type=int, default=None)
    sub.add_parser("list", help="print experiment names and their keys")
    args = parser.parse_args(argv)

    if args.command == "list":
        for name, keys in sorted(available_experiments().items()):
            print(name)
            for key, desc in keys.items():
                print(f"  {key} ({desc})")
        return 0

    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        config = load_config(text)
    except ConfigError as exc:
        for line, msg in exc.errors:
            where = f"{args.config}:{line}" if line else str(args.config)
            print(f"error: {where}: {msg}", file=sys.stderr)
        return 1
    if args.seed is not None and "seed" in config.values:
        config = ExperimentConfig(config.experiment,
                                  {**config.values, "seed": args.seed})
    threads = resolve_threads(args.threads)

    try:
        report = run(config, threads=threads, budget=args.budget)
    except CurvelabError as exc:
        print(f"error: {args.config}: experiment failed: {exc}", file=sys.stderr)
        return 1

    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{config.experiment}.csv"
    emit_csv(report, csv_path)
    written = [str(csv_path)]
    if report.verdicts:
        verdict_path = args.out / f"{config.experiment}_verdicts.csv"
        emit_verdicts_csv(report, verdict_path)
        written.append(str(verdict_path))
    axes = _PLOT_AXES.get(config.experiment)
    if axes:
        svg_path = args.out / f"{config.experiment}.svg"
        emit_svg(report, svg_path, *axes)
        written.append(str(svg_path))

    for v in report.verdicts:
        print(f"[{'PASS' if v.passed else 'FAIL'}] {v.criterion}: {v.detail}")
    print("wrote " + ", ".join(written))
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
