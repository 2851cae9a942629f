"""Command line: ``qdistill {run,preset,list-presets,bound}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import ConfigError, NumericalError, load_config, run
from .presets import expand, get_preset, list_presets

log = logging.getLogger("qdistill")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--base", choices=("nat", "2"), default=None, help="log base for reported entropies")
    p.add_argument("--out-dir", default=None, help="directory for summary and CSV files")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweep grids")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdistill", description="Greedy subsystem entropy reduction experiments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment from a YAML config")
    p.add_argument("config")
    _common(p)
    p = sub.add_parser("bound", help="evaluate only the entropy bound of a config's initial state")
    p.add_argument("config")
    _common(p)
    p = sub.add_parser("preset", help="run a built-in experiment")
    p.add_argument("name")
    _common(p)
    sub.add_parser("list-presets", help="print the built-in experiment names")
    return ap


def _emit(summary: dict, out_dir) -> None:
    keys = ("name", "final_entropy", "bound", "difference", "final_n_B", "wall_seconds")
    print(json.dumps({k: summary.get(k) for k in keys}, default=float))
    if out_dir is not None:
        log.info("wrote results to %s", out_dir)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list-presets":
        print("\n".join(list_presets()))
        return 0
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "preset":
            try:
                names = expand(args.name)
            except KeyError as exc:
                print(f"error: {exc.args[0]}", file=sys.stderr)
                return EXIT_CONFIG
            multi = len(names) > 1
            for name in names:
                cfg = get_preset(name)
                out = args.out_dir or cfg.out_dir or f"results/{args.name}"
                out = Path(out) / name if multi else Path(out)
                res = run(cfg, out, args.seed, args.base, args.threads)
                _emit(res.summary, out)
            return 0
        cfg = load_config(args.config)
        if args.command == "bound":
            cfg = replace(cfg, mode="bound")
        out = args.out_dir or cfg.out_dir or f"results/{cfg.name}"
        res = run(cfg, out, args.seed, args.base, args.threads)
        _emit(res.summary, out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure in {exc.operation}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
