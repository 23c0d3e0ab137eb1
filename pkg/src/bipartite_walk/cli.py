"""Command line entry point: ``run``, ``validate``, ``table`` and ``figures``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .graph import InvalidArgument
from .reduced import DegenerateBasisError


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bipartite-walk", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one configuration and write a CSV trace")
    r.add_argument("--config", help="key=value config file; flags override it")
    for name in ("n1", "n2", "k1", "k2", "steps", "seed"):
        r.add_argument(f"--{name}", type=int)
    r.add_argument("--init", choices=harness.spectral.INITS)
    r.add_argument("--engine", choices=harness.ENGINES)
    r.add_argument("--out", dest="output_path", help="CSV path (default: stdout)")

    v = sub.add_parser("validate", help="cross-check engines and closed forms")
    v.add_argument("--grid", default="default", help="default, figures, random or n1xn2xk1xk2,...")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=6, help="number of random configurations")
    v.add_argument("--steps", type=int, default=100)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", help="report path (default: stdout)")

    t = sub.add_parser("table", help="predicted versus measured summary table")
    t.add_argument("--scale", type=int, default=400)
    t.add_argument("--engine", choices=("full", "reduced"), default="reduced")
    t.add_argument("--out", help="CSV path (default: stdout)")

    f = sub.add_parser("figures", help="write one CSV per figure panel")
    f.add_argument("--outdir", default="figures")
    f.add_argument("--steps", type=int, default=60)
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        harness._write_text(path, text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            cfg = harness.load_config(
                args.config,
                **{k: getattr(args, k) for k in ("n1", "n2", "k1", "k2", "init", "engine", "steps", "seed", "output_path")},
            )
            trace = harness.compute_trace(cfg)
            _emit(harness.format_csv(trace), cfg.output_path)
        elif args.command == "validate":
            grid = harness.parse_grid(args.grid, args.seed, args.count)
            report = harness.validate(grid, args.seed, args.steps, args.jobs)
            _emit(report.to_text(), args.out)
            return 0 if report.passed else 1
        elif args.command == "table":
            _emit(harness.format_table(harness.table(args.scale, args.engine)), args.out)
        else:
            for panel, path in harness.figures(args.outdir, args.steps).items():
                print(f"{panel} {path}")
    except DegenerateBasisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
