"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or configuration error,
3 runtime or training failure.
"""

import argparse
import asyncio
import sys
import time
from pathlib import Path
from typing import Any, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from .core import EXPERIMENTS, DetectionPipeline, PipelineFactory, Scale, reproduce_experiment
from .core.experiments import load_recipe
from .errors import ConfigError, DataError, EmptyBatchError, ShapeMismatchError, StreetForensicsError
from .evaluation import ReportFormat, render_report
from .infrastructure import bind_context, build_config, create_run_id, load_config
from .infrastructure.config import validation_error_to_config_error
from .models import AggregationPolicy, Quality, RunConfig, RunSpec, Subcommand

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_FAILURE = 3

QUALITY_FLAGS = {"raw": Quality.RAW, "hq": Quality.HQ, "lq": Quality.LQ}


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage problems as exceptions instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file (a matrix spec for 'matrix')")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="single seed for split, initialization, shuffling and fixtures")
    common.add_argument("--quality", choices=sorted(QUALITY_FLAGS), help="restrict to, or compress into, one quality")
    common.add_argument("--policy", choices=[policy.value for policy in AggregationPolicy],
                        help="video-level aggregation policy reported by 'eval'")
    common.add_argument("--format", choices=[fmt.value for fmt in ReportFormat], default=ReportFormat.TEXT.value,
                        help="report format (default: text)")
    common.add_argument("--threshold", type=float, help="fake-score decision threshold (default 0.5)")
    common.add_argument("--permissive", action="store_true", help="skip unreadable videos during ingest")
    common.add_argument("--scale", choices=[scale.value for scale in Scale], default=Scale.FIXTURE.value,
                        help="corpus scale for 'reproduce' (default: fixture)")
    common.add_argument("--experiment", choices=EXPERIMENTS, help="experiment for 'reproduce' or reference table for 'report'")
    common.add_argument("--input", help="csv matrix to re-render with 'report'")
    common.add_argument("--verbose", "-v", action="count", default=0, help="debug logging")
    common.add_argument("--log-file", help="also write log records to this file")
    common.add_argument("--console-logs", action="store_true", help="human-readable logs instead of JSON")

    parser = ArgumentParser(
        prog="streetforensics",
        description="Detect GAN-synthesized driving videos: build corpora, train and evaluate the detector.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  streetforensics synth --config configs/fixture.cfg --out runs/fixture
  streetforensics split --config runs/fixture.cfg --out runs/fixture
  streetforensics matrix --config table3.cfg --out runs/table3
  streetforensics reproduce --experiment table4 --scale fixture --out runs/table4
        """,
    )
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    help_text = {
        Subcommand.INGEST: "build a manifest from a corpus directory",
        Subcommand.SYNTH: "generate a synthetic fixture corpus",
        Subcommand.COMPRESS: "add H.264 copies at one quality",
        Subcommand.SPLIT: "assign videos to train/val/test",
        Subcommand.TRAIN: "train the detector on one condition",
        Subcommand.EVAL: "evaluate a checkpoint on a test split",
        Subcommand.MATRIX: "evaluate checkpoints against test conditions",
        Subcommand.REPORT: "re-render a matrix or a published reference table",
        Subcommand.REPRODUCE: "run a table-shaped experiment end to end",
    }
    for subcommand in Subcommand:
        subparsers.add_parser(subcommand.value, parents=[common], help=help_text[subcommand])
    return parser


def override(section: BaseModel, prefix: str, **updates: Any) -> BaseModel:
    """Re-validate a config section with flag values applied; None leaves a field alone."""
    values = {key: value for key, value in updates.items() if value is not None}
    if not values:
        return section
    return build_config(type(section), {**section.model_dump(), **values}, prefix)


def resolve_config(args: argparse.Namespace, subcommand: Subcommand) -> RunConfig:
    if subcommand is Subcommand.REPRODUCE:
        if args.config:
            config = load_config(args.config, RunConfig)
        elif args.experiment:
            config = load_recipe(args.experiment, args.scale)
        else:
            raise ConfigError("experiment", "reproduce needs --experiment or --config")
    elif args.config and subcommand is not Subcommand.MATRIX:
        config = load_config(args.config, RunConfig)
    else:
        config = RunConfig()

    quality = QUALITY_FLAGS.get(args.quality)
    updates = {
        "corpus": override(config.corpus, "corpus", permissive=args.permissive or None),
        "eval": override(config.eval, "eval", threshold=args.threshold, policy=args.policy),
    }
    if quality is not None and subcommand in (Subcommand.TRAIN, Subcommand.EVAL):
        updates["data"] = override(config.data, "data", qualities=[quality])
    return config.model_copy(update=updates).seeded(args.seed)


def prepare_output(path: str) -> Path:
    out_dir = Path(path)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError("out", f"cannot create output directory {out_dir}: {e}") from e
    return out_dir


async def dispatch(pipeline: DetectionPipeline,
                   args: argparse.Namespace,
                   subcommand: Subcommand,
                   config: RunConfig,
                   out_dir: Path) -> str:
    """Run one subcommand and return what it prints on stdout."""
    format = ReportFormat(args.format)

    if subcommand is Subcommand.INGEST:
        manifest = await pipeline.ingest(config, out_dir)
        return f"{len(manifest)} videos ({len(manifest.excluded)} excluded) -> {out_dir / 'manifest.jsonl'}\n"
    if subcommand is Subcommand.SYNTH:
        manifest = await pipeline.synthesize(config, out_dir)
        return f"{len(manifest)} fixture videos -> {out_dir / 'manifest.jsonl'}\n"
    if subcommand is Subcommand.COMPRESS:
        if args.quality is None:
            raise ConfigError("quality", "compress needs --quality hq or --quality lq")
        manifest = await pipeline.compress(config, out_dir, QUALITY_FLAGS[args.quality])
        return f"{len(manifest)} videos -> {out_dir / 'manifest.jsonl'}\n"
    if subcommand is Subcommand.SPLIT:
        assignment = await pipeline.split(config, out_dir)
        counts = assignment.counts()
        return " ".join(f"{name}={count}" for name, count in counts.items()) + f" -> {out_dir / 'split.jsonl'}\n"
    if subcommand is Subcommand.TRAIN:
        result = await pipeline.train(config, out_dir)
        return (f"best epoch {result.best_epoch} (val loss {result.best_val_loss:.6f}), "
                f"stopped by {result.stop_reason.value} -> {result.best_checkpoint}\n")
    if subcommand is Subcommand.EVAL:
        report = await pipeline.evaluate(config, out_dir, format)
        return render_report(report, format)
    if subcommand is Subcommand.MATRIX:
        if not args.config:
            raise ConfigError("config", "matrix needs --config pointing at a matrix spec")
        matrix = await pipeline.matrix(args.config, out_dir, format, config.eval.threshold, config.data.cache_dir)
        return render_report(matrix, format)
    if subcommand is Subcommand.REPORT:
        source = args.input or args.experiment
        if not source:
            raise ConfigError("input", "report needs --input <matrix.csv> or --experiment <name>")
        return await pipeline.report(source, out_dir, format)

    outcome = await reproduce_experiment(pipeline, args.experiment or Path(args.config).stem,
                                         args.scale, out_dir, config, format)
    text = render_report(outcome.matrix, format)
    if outcome.reference is not None and format is ReportFormat.TEXT:
        text += "\n" + render_report(outcome.reference, format)
    return text


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(parser.format_usage() + f"error: {e}\n")
        return EXIT_USAGE
    if args.subcommand is None:
        sys.stderr.write(parser.format_help())
        return EXIT_USAGE

    pipeline: Optional[DetectionPipeline] = None
    try:
        subcommand = Subcommand(args.subcommand)
        spec = RunSpec(subcommand=subcommand, config_path=args.config, output_dir=args.out,
                       seed_override=args.seed, verbosity=args.verbose)
        config = resolve_config(args, subcommand)
        out_dir = prepare_output(spec.output_dir)
        pipeline = PipelineFactory.create_pipeline(
            log_level="DEBUG" if spec.verbosity else "INFO",
            log_file=args.log_file,
            json_logs=not args.console_logs,
        )
        bind_context(run_id=create_run_id(), subcommand=subcommand.value)
        pipeline.logger.log_run_started(subcommand.value, str(out_dir), config.seed)
        started = time.perf_counter()

        async def execute() -> str:
            await pipeline.write_run_stamp(out_dir, argv, subcommand.value, config,
                                           {"config_path": args.config})
            return await dispatch(pipeline, args, subcommand, config, out_dir)

        output = asyncio.run(execute())
        pipeline.logger.log_run_complete(subcommand.value, time.perf_counter() - started)
    except ValidationError as e:
        sys.stderr.write(f"error: {validation_error_to_config_error(e)}\n")
        return EXIT_DATA
    except DataError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_DATA
    except (StreetForensicsError, EmptyBatchError, ShapeMismatchError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        sys.stderr.write("interrupted\n")
        return EXIT_FAILURE
    except Exception as e:
        if pipeline is not None:
            pipeline.logger.log_unexpected_failure(args.subcommand, e)
        sys.stderr.write(f"error: unexpected failure: {type(e).__name__}: {e}\n")
        return EXIT_FAILURE

    sys.stdout.write(output)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
