"""Command line entry point: ``run``, ``sweep`` and ``check``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .dynamics import SimulationAbort
from .sweep import execute, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_ABORT = 0, 1, 2


def _parse_values(text: str, axis: str) -> list:
    conv = int if axis == "n_cells" else float
    return [conv(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="porousfilms", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "check"):
        sp = sub.add_parser(name)
        sp.add_argument("config", type=Path)
        sp.add_argument("--output-dir", type=Path, default=None)
        sp.add_argument("--quiet", action="store_true")
        if name == "sweep":
            sp.add_argument("--axis", required=True, choices=["epsilon", "n_cells", "R", "R_mu"])
            sp.add_argument("--values", required=True)
            sp.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    log = logging.getLogger("porousfilms")
    try:
        config = load_config(args.config)
        if args.output_dir is not None:
            config = dataclasses.replace(config, output_dir=args.output_dir)
        values = _parse_values(args.values, args.axis) if args.command == "sweep" else None
        if values is not None:
            for v in values:
                config.with_value(args.axis, v)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "check":
        log.info("config OK: %s", args.config)
        return EXIT_OK
    if args.command == "run":
        try:
            _, series = execute(config)
        except SimulationAbort as exc:
            print(f"aborted: {exc}", file=sys.stderr)
            return EXIT_ABORT
        last = series[-1]
        log.info("t=%g mass_f=%.17g mass_g=%.17g e1=%.6g e2=%.6g -> %s",
                 last.time, last.mass_f, last.mass_g, last.e1, last.e2, config.output_dir)
        return EXIT_OK
    rows = run_sweep(config, args.axis, values, jobs=args.jobs)
    for r in rows:
        log.info("%s=%s %s", args.axis, r["value"], r["status"])
    return EXIT_ABORT if any(r["status"] != "ok" for r in rows) else EXIT_OK
