#!/usr/bin/env python3

# Copyright (c) kgman contributors.
# This source code is licensed under the MIT license found in the
# LICENSE file in the root directory of this source tree.

import argparse
import os
import os.path as osp
import sys
from typing import List, Optional

from kgman.cli.config import ExperimentConfig, load_config
from kgman.cli.emit import Emitter
from kgman.cli.experiments import experiment_map
from kgman.errors import ConfigError
from kgman.logging import FailedCheckException, logger, set_verbosity

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_CHECK = 3

DEFAULT_OUT = "kgman_out"


class KgmanArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = KgmanArgumentParser(
        prog="kgman",
        description="Klein-Gordon homoclinic and invariant-manifold experiments",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "experiment",
        metavar="experiment",
        help="one of: " + ", ".join(sorted(experiment_map)),
    )
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument(
        "--out",
        default=None,
        help=f"output directory (else output.dir, $KGMAN_OUT or {DEFAULT_OUT})",
    )
    parser.add_argument(
        "--jobs", type=int, default=1, help="worker processes for sweep points"
    )
    parser.add_argument(
        "--verbosity",
        type=int,
        default=None,
        choices=range(4),
        help="glog level 0=INFO .. 3=FATAL (else $GLOG_minloglevel)",
    )
    return parser


def output_dir(cli_out: Optional[str], cfg: ExperimentConfig) -> str:
    r"""``--out``, then ``output.dir``, then ``$KGMAN_OUT``, then the default"""
    for candidate in (cli_out, cfg.output_dir, os.environ.get("KGMAN_OUT")):
        if candidate:
            return candidate
    return DEFAULT_OUT


def run(name: str, cfg: ExperimentConfig, out_dir: str, jobs: int = 1) -> int:
    r"""Runs one registered experiment and returns the exit status

    ``checks.csv`` is written whether or not the run passes.
    """
    experiment = experiment_map[name]
    try:
        experiment.truncation(cfg)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG

    emitter = Emitter(osp.join(out_dir, name))
    logger.info(f"Running {name} into {emitter.out_dir}")
    try:
        experiment.run(cfg, emitter, jobs)
    except FailedCheckException as e:
        logger.error(f"{name} failed: {e}")
        return EXIT_CHECK
    except ValueError as e:
        logger.error(f"{name}: invalid configuration: {e}")
        return EXIT_CONFIG
    except RuntimeError as e:
        logger.error(f"{name} failed: {type(e).__name__}: {e}")
        return EXIT_CHECK
    finally:
        emitter.write_checks()

    logger.info(f"{name}: all {len(emitter.checks)} checks passed")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.experiment not in experiment_map:
        parser.error(
            f"unknown experiment '{args.experiment}', choose from "
            + ", ".join(sorted(experiment_map))
        )
    if args.jobs < 1:
        parser.error(f"--jobs must be at least 1, got {args.jobs}")
    if args.verbosity is not None:
        set_verbosity(args.verbosity)

    try:
        cfg = ExperimentConfig() if args.config is None else load_config(args.config)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    if cfg.experiment is not None and cfg.experiment != args.experiment:
        logger.error(
            f"config is for experiment '{cfg.experiment}', not '{args.experiment}'"
        )
        return EXIT_CONFIG

    return run(args.experiment, cfg, output_dir(args.out, cfg), args.jobs)


if __name__ == "__main__":
    sys.exit(main())
