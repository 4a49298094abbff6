"""Command line: run an experiment config, list the catalog or open the launcher"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numba

from . import __version__
from .core.errors import JacobiLabError
from .core.experiment import (EXIT_ERROR, OUTPUT_ENV, ExperimentConfig, ExperimentRun,
                              default_output_folder, list_experiments)

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacobi-lab",
        description="Spectral experiments for oscillatory Jacobi matrices and half-line Schrödinger operators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one experiment config")
    run.add_argument("config", type=Path, help="experiment config (JSON)")
    run.add_argument("--output", type=Path, default=None,
                     help=f"output folder for this run (default: ${OUTPUT_ENV} or {default_output_folder()}/run_<timestamp>)")
    run.add_argument("--threads", type=int, default=1, help="worker threads over grid points")
    run.add_argument("--seed", type=int, default=None, help="overrides the config seed")

    listing = commands.add_parser("list", help="show the experiment catalog")
    listing.add_argument("--json", action="store_true", help="print the catalog as JSON")

    commands.add_parser("gui", help="open the launcher window")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(message)s")


def _set_threads(threads: int):
    if threads > 1:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def cmd_run(args) -> int:
    try:
        config = ExperimentConfig.load(args.config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.output is not None:
            config = replace(config, output_path=str(args.output))
    except JacobiLabError as e:
        log.error("[RUN] Failed to load %s: %s", args.config, e)
        return EXIT_ERROR

    threads = max(1, args.threads)
    _set_threads(threads)
    experiment_run = ExperimentRun(config, threads=threads)
    status = experiment_run.execute()
    if experiment_run.result is not None:
        print(f"{config.experiment}: {experiment_run.result.verdict} -> {experiment_run.run_folder}")
    return status


def cmd_list(args) -> int:
    catalog = list_experiments()
    if args.json:
        print(json.dumps(catalog, indent=2))
        return 0
    width = max(len(entry["name"]) for entry in catalog)
    for entry in catalog:
        print(f"{entry['name']:<{width}}  {entry['description']}")
        print(f"{'':<{width}}  exercises: {entry['exercises']}")
    return 0


def cmd_gui(args) -> int:
    from .app import main as gui_main
    return gui_main()


COMMANDS = {"run": cmd_run, "list": cmd_list, "gui": cmd_gui}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
