"""Command-line interface for the quotegraph pipeline."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import colorlog

from .config import ConfigError, build_config, read_config_file, validate_paths
from .const import LOGGER, STAGES, VERSION
from .corpus_io import QuotegraphError
from .pipeline import PipelineStageError, run_pipeline, run_stage
from .synth import generate_synthetic

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .config import PipelineConfig

LOG_FORMAT = "%(log_color)s%(asctime)s %(levelname)-8s%(reset)s %(name)s: %(message)s"

# Flag -> input path field
INPUT_FLAGS = {
    "articles": "articles",
    "aliases": "alias_table",
    "snapshot": "snapshot",
    "hierarchy": "hierarchy",
    "defunct": "defunct",
    "stopwords": "stopwords",
}


def setup_logging(verbosity: int) -> None:
    """Install a colored stream handler on the package logger."""
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    LOGGER.handlers[:] = [handler]
    LOGGER.propagate = False
    if verbosity > 0:
        LOGGER.setLevel(logging.DEBUG)
    elif verbosity < 0:
        LOGGER.setLevel(logging.WARNING)
    else:
        LOGGER.setLevel(logging.INFO)


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        msg = f"{value} is not a positive integer"
        raise argparse.ArgumentTypeError(msg)
    return number


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML configuration file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=_positive_int, help="worker threads")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_const", const=1, dest="verbosity"
    )
    verbosity.add_argument(
        "-q", "--quiet", action="store_const", const=-1, dest="verbosity"
    )

    thresholds = common.add_argument_group("thresholds")
    thresholds.add_argument(
        "--min-quote-words",
        type=_positive_int,
        dest="min_unique_words",
        help="minimum unique content words of a quotation (l_q)",
    )
    thresholds.add_argument(
        "--min-shared-substring",
        type=_positive_int,
        dest="min_shared_substring",
        help="words two quotations must share to be grouped (l_s)",
    )
    thresholds.add_argument(
        "--min-global-probability",
        type=float,
        help="drop attributions with a lower global probability",
    )
    thresholds.add_argument("--damping", type=float, help="PageRank damping")
    thresholds.add_argument("--tolerance", type=float, help="PageRank L1 tolerance")

    inputs = common.add_argument_group("inputs")
    inputs.add_argument("--articles", type=Path, help="article corpus (JSON lines)")
    inputs.add_argument("--aliases", type=Path, help="alias table (TSV)")
    inputs.add_argument("--snapshot", type=Path, help="Wikidata snapshot (JSON lines)")
    inputs.add_argument("--hierarchy", type=Path, help="occupation subclass pairs")
    inputs.add_argument("--defunct", type=Path, help="defunct country QIDs")
    inputs.add_argument("--stopwords", type=Path, help="stopword list")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with one subcommand per stage."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="quotegraph",
        description="Build a speaker -> mentioned person network from quotations.",
    )
    parser.add_argument("--version", action="version", version=VERSION)
    commands = parser.add_subparsers(dest="command", required=True)
    for stage in STAGES:
        commands.add_parser(stage, parents=[common], help=f"run the {stage} stage")
    commands.add_parser("run", parents=[common], help="run every stage")
    synth = commands.add_parser(
        "synth", parents=[common], help="generate a synthetic corpus"
    )
    synth.add_argument("--size", type=_positive_int, default=200, help="articles")
    synth.add_argument("--seed", type=int, help="random seed")
    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """Merge the configuration file, if any, with the command-line flags."""
    file_values = read_config_file(args.config) if args.config else {}
    overrides: dict[str, Any] = {
        key: getattr(args, key)
        for key in (
            "out",
            "threads",
            "min_unique_words",
            "min_shared_substring",
            "min_global_probability",
            "damping",
            "tolerance",
        )
    }
    overrides["inputs"] = {
        field: getattr(args, flag) for flag, field in INPUT_FLAGS.items()
    }
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return build_config(file_values, overrides)


def _failure(err: QuotegraphError) -> str:
    if isinstance(err, PipelineStageError):
        return str(err)
    if isinstance(err, ConfigError) and err.stage is not None:
        return f"stage {err.stage} failed: {err}"
    return f"error: {err}"


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line.

    Returns:
        0 on success, 1 if a stage failed. Usage errors exit with status 2.

    """
    args = build_parser().parse_args(argv)
    setup_logging(args.verbosity or 0)
    try:
        config = config_from_args(args)
        if args.command == "synth":
            generate_synthetic(config, args.size)
        elif args.command == "run":
            run_pipeline(config)
        else:
            validate_paths(config, [args.command])
            run_stage(args.command, config)
    except QuotegraphError as err:
        LOGGER.debug("Command %s failed", args.command, exc_info=err)
        print(_failure(err), file=sys.stderr)  # noqa: T201
        return 1
    return 0
