import asyncio
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..dataset import LayoutRule, build_manifest, merge, select, split_manifest
from ..errors import ConfigError, ManifestError, MatrixSpecError, PipelineFailure, SplitError
from ..evaluation import (
    ColumnCondition,
    ReportFormat,
    RowCondition,
    evaluate,
    load_matrix_spec,
    parse_matrix_csv,
    render_report,
    run_condition_matrix,
)
from ..evaluation.reference import REFERENCE_TABLES
from ..infrastructure import PipelineLogger, corpus_root_override
from ..media import FFprobeProber, VideoFrameSource, VideoProber, compress_manifest
from ..models import (
    ConditionMatrix,
    DataConfig,
    DatasetManifest,
    EvalReport,
    ModelConfig,
    Quality,
    QualityLevel,
    RunConfig,
    Split,
    SplitAssignment,
    TrainConfig,
)
from ..models.manifest import MANIFEST_SCHEMA_VERSION, SPLIT_SCHEMA_VERSION
from ..network import build_network, load_checkpoint
from ..network.checkpoint import CHECKPOINT_SCHEMA_VERSION
from ..repositories import CorpusRepository
from ..synthgen import describe_fixture, generate_fixture
from ..training import TrainingResult, load_split_frames, train
from ..validators import ManifestValidator, validate_manifest

MANIFEST_FILE = "manifest.jsonl"
SPLIT_FILE = "split.jsonl"
PROVENANCE_FILE = "provenance.txt"
VALIDATION_FILE = "validation.txt"
RUN_STAMP_FILE = "run_stamp.json"

REPORT_EXTENSIONS = {
    ReportFormat.TEXT: "txt",
    ReportFormat.CSV: "csv",
    ReportFormat.STRUCTURED: "jsonl",
}


def report_path(out_dir: Path, stem: str, format: ReportFormat) -> Path:
    return out_dir / f"{stem}.{REPORT_EXTENSIONS[format]}"


def require(value: Optional[str], field: str) -> str:
    if not value:
        raise ConfigError(field, "required for this subcommand")
    return value


def resolve_cache_dir(cache_dir: Optional[str], out_dir: Path) -> Optional[Path]:
    """Relative cache directories live under the run's output directory."""
    if not cache_dir:
        return None
    path = Path(cache_dir)
    return path if path.is_absolute() else out_dir / path


def restrict(manifest: DatasetManifest, data: DataConfig) -> DatasetManifest:
    """Apply the configured sub-dataset and quality condition."""
    if data.sub_datasets is None and data.qualities is None:
        return manifest
    return select(manifest, data.sub_datasets, data.qualities)


class DetectionPipeline:
    """Runs each pipeline stage against files on disk; every artifact lands under the given output dir."""

    def __init__(self,
                 repository: CorpusRepository,
                 logger: Optional[PipelineLogger] = None,
                 prober: Optional[VideoProber] = None,
                 ffmpeg_bin: str = "ffmpeg"):
        self.repository = repository
        self.logger = logger or PipelineLogger()
        self.prober = prober or FFprobeProber()
        self.ffmpeg_bin = ffmpeg_bin

    # Persistence

    async def load_manifest(self, path: str) -> DatasetManifest:
        return (await self.repository.read_manifest(path)).expect(ManifestError)

    async def load_split(self, path: str) -> SplitAssignment:
        return (await self.repository.read_split(path)).expect(SplitError)

    async def save_manifest(self, manifest: DatasetManifest, path: Path) -> Path:
        manifest.require_unique_ids()
        (await self.repository.write_manifest(manifest, str(path))).expect(PipelineFailure)
        return path

    async def save_split(self, assignment: SplitAssignment, path: Path) -> Path:
        (await self.repository.write_split(assignment, str(path))).expect(PipelineFailure)
        return path

    async def save_text(self, text: str, path: Path) -> Path:
        (await self.repository.write_text(text, str(path))).expect(PipelineFailure)
        return path

    async def write_run_stamp(self,
                              out_dir: Path,
                              argv: Sequence[str],
                              subcommand: str,
                              config: RunConfig,
                              extra: Optional[Dict[str, object]] = None) -> Path:
        """Everything needed to re-run an invocation; no wall-clock values so reruns stamp identically."""
        from .. import __version__

        stamp = {
            "argv": list(argv),
            "subcommand": subcommand,
            "seed": config.seed,
            "config": config.model_dump(mode="json"),
            "schema_versions": {
                "manifest": MANIFEST_SCHEMA_VERSION,
                "split": SPLIT_SCHEMA_VERSION,
                "checkpoint": CHECKPOINT_SCHEMA_VERSION,
            },
            "package_version": __version__,
        }
        if extra:
            stamp.update(extra)
        return await self.save_text(json.dumps(stamp, indent=2, sort_keys=True) + "\n", out_dir / RUN_STAMP_FILE)

    def require_usable(self, manifest: DatasetManifest) -> DatasetManifest:
        """Reject manifests with duplicate ids or missing files before any frame is decoded."""
        ManifestValidator(self.prober, probe_media=False).require_valid(manifest).unwrap()
        return manifest

    def frame_source(self, model: ModelConfig, cache_dir: Optional[str], out_dir: Path) -> VideoFrameSource:
        return VideoFrameSource(size=(model.input_height, model.input_width),
                                cache_dir=resolve_cache_dir(cache_dir, out_dir))

    # Stages

    async def ingest(self, config: RunConfig, out_dir: Path) -> DatasetManifest:
        root = corpus_root_override() or require(config.corpus.root, "corpus.root")
        rule = LayoutRule(pattern=config.corpus.pattern) if config.corpus.pattern else LayoutRule()
        manifest = await asyncio.to_thread(
            build_manifest, root, rule, config.corpus.permissive, self.prober, self.logger
        )
        report = validate_manifest(manifest, probe_media=False)
        lines = [f"records checked: {report.records_checked}"]
        lines.extend(f"{finding.kind.value}: {finding.subject} {finding.detail}".rstrip() for finding in report.findings)
        await self.save_text("\n".join(lines) + "\n", out_dir / VALIDATION_FILE)
        await self.save_manifest(manifest, out_dir / MANIFEST_FILE)
        return manifest

    async def synthesize(self, config: RunConfig, out_dir: Path) -> DatasetManifest:
        manifest = await generate_fixture(config.fixture, out_dir,
                                          max_concurrency=config.data.max_concurrency,
                                          ffmpeg_bin=self.ffmpeg_bin, logger=self.logger)
        await self.save_manifest(manifest, out_dir / MANIFEST_FILE)
        await self.save_text(describe_fixture(manifest), out_dir / PROVENANCE_FILE)
        return manifest

    async def compress(self, config: RunConfig, out_dir: Path, quality: Quality) -> DatasetManifest:
        """Add `quality` copies of every RAW record; the written manifest holds sources and copies."""
        if quality is Quality.RAW:
            raise ConfigError("quality", "choose hq or lq to compress")
        source = await self.load_manifest(require(config.data.manifest, "data.manifest"))
        compressed = await compress_manifest(source, QualityLevel.of(quality), out_dir,
                                             max_concurrency=config.data.max_concurrency,
                                             ffmpeg_bin=self.ffmpeg_bin, prober=self.prober,
                                             logger=self.logger)
        combined = merge([source, compressed], source_description=compressed.source_description)
        await self.save_manifest(combined, out_dir / MANIFEST_FILE)
        return combined

    async def split(self, config: RunConfig, out_dir: Path) -> SplitAssignment:
        manifest = await self.load_manifest(require(config.data.manifest, "data.manifest"))
        assignment = split_manifest(manifest, config.split.ratios, config.split.seed, self.logger)
        await self.save_split(assignment, out_dir / SPLIT_FILE)
        return assignment

    def train_condition(self,
                        manifest: DatasetManifest,
                        split: SplitAssignment,
                        model: ModelConfig,
                        train_config: TrainConfig,
                        out_dir: Path,
                        frame_source: VideoFrameSource,
                        condition: str = "") -> TrainingResult:
        """Train a fresh network on the train/val videos of one condition."""
        train_records = split.records(manifest, Split.TRAIN)
        val_records = split.records(manifest, Split.VAL)
        if not train_records or not val_records:
            raise SplitError(f"condition '{condition or 'all'}' has no training or validation videos")
        network = build_network(model)
        result = train(network,
                       load_split_frames(train_records, frame_source),
                       load_split_frames(val_records, frame_source),
                       train_config, out_dir, logger=self.logger)
        _, header = load_checkpoint(result.best_checkpoint)
        self.logger.log_condition_trained(condition or "all", header.checkpoint_id,
                                          result.best_epoch, result.stop_reason.value)
        return result

    async def train(self, config: RunConfig, out_dir: Path) -> TrainingResult:
        if config.train is None:
            raise ConfigError("train.max_epochs", "required for this subcommand")
        manifest = self.require_usable(
            restrict(await self.load_manifest(require(config.data.manifest, "data.manifest")), config.data)
        )
        split = await self.load_split(require(config.data.split, "data.split"))
        frame_source = self.frame_source(config.model, config.data.cache_dir, out_dir)
        return await asyncio.to_thread(
            self.train_condition, manifest, split, config.model, config.train, out_dir, frame_source
        )

    async def evaluate(self, config: RunConfig, out_dir: Path, format: ReportFormat) -> EvalReport:
        network, header = load_checkpoint(require(config.eval.checkpoint, "eval.checkpoint"))
        split_path = require(config.data.split, "data.split")
        manifest = self.require_usable(
            restrict(await self.load_manifest(require(config.data.manifest, "data.manifest")), config.data)
        )
        split = await self.load_split(split_path)
        frame_source = self.frame_source(header.network_config, config.data.cache_dir, out_dir)
        report = await asyncio.to_thread(
            evaluate, network, split, manifest, frame_source,
            header.checkpoint_id, f"{Path(split_path).stem}:test", config.eval.threshold, self.logger
        )
        policy = config.eval.policy
        report = report.model_copy(update={
            "video_counts": {policy: report.video_counts[policy]} if policy in report.video_counts else {},
        })
        await self.save_text(render_report(report, format), report_path(out_dir, "report", format))
        return report

    async def matrix(self, spec_path: str, out_dir: Path, format: ReportFormat,
                     threshold: float, cache_dir: Optional[str] = None) -> ConditionMatrix:
        spec = load_matrix_spec(spec_path)
        spec.check_complete()

        rows: List[RowCondition] = []
        input_sizes = set()
        for label in spec.rows:
            network, header = load_checkpoint(spec.checkpoint[label])
            input_sizes.add((header.network_config.input_height, header.network_config.input_width))
            rows.append(RowCondition(label=label, model=network, checkpoint_id=header.checkpoint_id))
        if len(input_sizes) > 1:
            raise MatrixSpecError("*", "*", f"checkpoints expect different input sizes: {sorted(input_sizes)}")

        columns: List[ColumnCondition] = []
        for label in spec.columns:
            manifest = await self.load_manifest(spec.manifest[label])
            if label in spec.quality or label in spec.sub_dataset:
                manifest = select(
                    manifest,
                    [spec.sub_dataset[label]] if label in spec.sub_dataset else None,
                    [spec.quality[label]] if label in spec.quality else None,
                )
            self.require_usable(manifest)
            split = await self.load_split(spec.split[label])
            columns.append(ColumnCondition(label=label, records=split.records(manifest, Split.TEST),
                                           split_id=f"{label}:test"))

        height, width = input_sizes.pop()
        frame_source = VideoFrameSource(size=(height, width), cache_dir=resolve_cache_dir(cache_dir, out_dir))
        matrix = await asyncio.to_thread(
            run_condition_matrix, rows, columns, frame_source, threshold,
            spec.title, spec.corner_label, self.logger
        )
        await self.save_text(render_report(matrix, format), report_path(out_dir, "matrix", format))
        return matrix

    async def report(self, source: str, out_dir: Path, format: ReportFormat) -> str:
        """Re-render a csv matrix, or a published reference table given by experiment name."""
        if source in REFERENCE_TABLES:
            matrix = REFERENCE_TABLES[source]
            stem = f"{source}_reference"
        else:
            path = Path(source)
            if not path.exists():
                raise ConfigError("report.input", f"not a csv matrix or reference table: {source}")
            matrix = parse_matrix_csv(path.read_text(encoding="utf-8"), title=path.stem)
            stem = path.stem
        text = render_report(matrix, format)
        await self.save_text(text, report_path(out_dir, stem, format))
        return text
