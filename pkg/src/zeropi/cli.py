"""Command-line interface: one subcommand per run mode.

Example:
    zeropi spectrum --config run.ini --out results/
"""

from __future__ import annotations

import argparse
import sys

from .config import MODES, ConfigError, load_config
from .grid import AssemblyError
from .runner import run
from .solver import ConvergenceError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeropi",
        description="Spectral simulator for the 0-pi superconducting circuit",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        mode_parser = sub.add_parser(mode, help=f"run a {mode} job")
        mode_parser.add_argument("--config", required=True,
                                 help="path to the run configuration file")
        mode_parser.add_argument("--out", default=".",
                                 help="output directory (default: cwd)")
        mode_parser.add_argument("--workers", type=int, default=None,
                                 help="override worker count from the config")
        mode_parser.add_argument("--seed", type=int, default=None,
                                 help="override the solver seed from the config")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if config.mode != args.mode:
            raise ConfigError(
                f"config mode '{config.mode}' does not match "
                f"subcommand '{args.mode}'"
            )
        if args.workers is not None:
            config.workers = args.workers
        if args.seed is not None:
            config.seed = args.seed
        exit_code = run(config, args.out)
    except (ConfigError, AssemblyError, ConvergenceError, ValueError,
            OSError) as exc:
        print(f"zeropi: error: {exc}", file=sys.stderr)
        return 1
    if exit_code != 0:
        print("zeropi: one or more points failed; see manifest.txt",
              file=sys.stderr)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
