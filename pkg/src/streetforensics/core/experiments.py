"""Table-shaped experiments at paper or fixture scale.

Recipes are config files under `configs/`. Both scales build one corpus
manifest, split it once, train one checkpoint per training condition and
evaluate on the test videos of each testing condition; only the corpus
source differs.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..dataset import LayoutRule, build_manifest, merge, select, split_manifest
from ..errors import ConfigError, MissingCorpusError
from ..evaluation import (
    ColumnCondition,
    ReportFormat,
    RowCondition,
    evaluate_records,
    render_report,
    run_condition_matrix,
    run_unseen_generator_eval,
    training_records,
)
from ..evaluation.reference import (
    REFERENCE_TABLES,
    UNSEEN_GENERATOR_HELDOUT,
    UNSEEN_GENERATOR_MATCHED,
)
from ..infrastructure import bind_context, corpus_root_override, load_config
from ..media import compress_manifest
from ..models import (
    DEEPSTREETS,
    ArtifactType,
    ConditionMatrix,
    DatasetManifest,
    ExperimentKind,
    ExperimentRecipe,
    QualityLevel,
    RunConfig,
    Split,
    SplitAssignment,
    SubDataset,
)
from ..network import load_checkpoint
from ..synthgen import generate_fixture
from .pipeline import MANIFEST_FILE, SPLIT_FILE, DetectionPipeline, report_path

CONFIG_DIR = Path(__file__).resolve().parents[3] / "configs"
EXPERIMENTS = ("table2", "table3", "table4", "unseen_generator")


class Scale(str, Enum):
    PAPER = "paper"
    FIXTURE = "fixture"


# Fixture stand-ins: one artifact family per generated sub-dataset.
FIXTURE_ARTIFACTS = {
    SubDataset.CITYVID: ArtifactType.CHECKERBOARD,
    SubDataset.CITYWCVID: ArtifactType.SPECTRAL_NOTCH,
    SubDataset.KITTIVID: ArtifactType.TEXTURE_SMOOTHING,
}

ACQUISITION_INSTRUCTIONS = """\
The DeepStreets corpus is distributed separately and is not downloaded by this tool.
Obtain the Cityvid, Citywcvid and Kittivid videos, lay them out as
  <root>/<sub_dataset>/<quality>/<label>/<video>
(quality RAW, HQ or LQ; label real or fake), then set corpus.root in the
experiment config or the STREETFORENSICS_CORPUS_ROOT environment variable.
Run with --scale fixture to exercise the same experiment on synthetic videos."""


@dataclass
class ExperimentOutcome:
    name: str
    scale: Scale
    matrix: ConditionMatrix
    reference: Optional[ConditionMatrix]
    report_paths: List[Path] = field(default_factory=list)
    checkpoints: Dict[str, str] = field(default_factory=dict)


def recipe_path(name: str, scale: Scale | str = Scale.FIXTURE) -> Path:
    """Shipped recipe: `configs/<name>.cfg` at fixture scale, `configs/paper/<name>.cfg` at paper scale."""
    if name not in EXPERIMENTS:
        raise ConfigError("experiment", f"unknown experiment '{name}', expected one of {', '.join(EXPERIMENTS)}")
    directory = CONFIG_DIR / "paper" if Scale(scale) is Scale.PAPER else CONFIG_DIR
    return directory / f"{name}.cfg"


def load_recipe(name: str, scale: Scale | str = Scale.FIXTURE) -> RunConfig:
    path = recipe_path(name, scale)
    config = load_config(path, RunConfig)
    if config.experiment is None:
        raise ConfigError("experiment.kind", f"{path} defines no experiment")
    return config


def involved_sub_datasets(recipe: ExperimentRecipe) -> List[SubDataset]:
    subs = list(recipe.sub_datasets)
    for extra in (recipe.real_source, recipe.fake_source, recipe.heldout_fakes):
        if extra is not None and extra not in subs:
            subs.append(extra)
    return subs


def unseen_reference(recipe: ExperimentRecipe) -> ConditionMatrix:
    return ConditionMatrix(
        title="Unseen generator (published)",
        corner_label="Training\\Testing",
        row_labels=[unseen_row_label(recipe)],
        column_labels=unseen_column_labels(recipe),
        cells=[[UNSEEN_GENERATOR_MATCHED, UNSEEN_GENERATOR_HELDOUT]],
    )


def unseen_row_label(recipe: ExperimentRecipe) -> str:
    return f"{recipe.real_source.value} real vs {recipe.fake_source.value} fake"


def unseen_column_labels(recipe: ExperimentRecipe) -> List[str]:
    return ["matched test", f"unseen {recipe.heldout_fakes.value} fakes"]


class ExperimentRunner:
    def __init__(self,
                 pipeline: DetectionPipeline,
                 name: str,
                 config: RunConfig,
                 scale: Scale,
                 out_dir: Path):
        if config.experiment is None:
            raise ConfigError("experiment.kind", "required for reproduce")
        if config.train is None:
            raise ConfigError("train.max_epochs", "required for reproduce")
        self.pipeline = pipeline
        self.logger = pipeline.logger
        self.name = name
        self.config = config
        self.recipe = config.experiment
        self.scale = scale
        self.out_dir = out_dir
        self.frame_source = pipeline.frame_source(config.model, config.data.cache_dir or "frame_cache", out_dir)
        self.checkpoints: Dict[str, str] = {}

    # Corpus

    async def fixture_corpus(self) -> DatasetManifest:
        manifests = []
        for offset, sub_dataset in enumerate(involved_sub_datasets(self.recipe)):
            fixture = self.config.fixture.model_copy(update={
                "artifact_type": FIXTURE_ARTIFACTS[sub_dataset],
                "seed": self.config.fixture.seed + offset,
            })
            manifests.append(await generate_fixture(
                fixture, self.out_dir / "fixtures", sub_dataset=sub_dataset,
                max_concurrency=self.config.data.max_concurrency,
                ffmpeg_bin=self.pipeline.ffmpeg_bin, logger=self.logger,
            ))
        return merge(manifests, source_description="synthetic fixtures standing in for DeepStreets")

    def paper_corpus(self) -> DatasetManifest:
        root = corpus_root_override() or self.config.corpus.root
        if not root or not Path(root).is_dir():
            raise MissingCorpusError(root or "<unset>", ACQUISITION_INSTRUCTIONS)
        rule = LayoutRule(pattern=self.config.corpus.pattern) if self.config.corpus.pattern else LayoutRule()
        manifest = build_manifest(root, rule, self.config.corpus.permissive, self.pipeline.prober, self.logger)
        return select(manifest, involved_sub_datasets(self.recipe))

    async def with_qualities(self, manifest: DatasetManifest) -> DatasetManifest:
        """Compress RAW sources into any required quality the corpus does not already hold."""
        present = {record.quality for record in manifest.records}
        for quality in self.recipe.qualities:
            if quality in present:
                continue
            compressed = await compress_manifest(
                manifest, QualityLevel.of(quality), self.out_dir / "compressed",
                max_concurrency=self.config.data.max_concurrency,
                ffmpeg_bin=self.pipeline.ffmpeg_bin, prober=self.pipeline.prober, logger=self.logger,
            )
            manifest = merge([manifest, compressed], source_description=manifest.source_description)
        return manifest

    async def corpus(self) -> Tuple[DatasetManifest, SplitAssignment]:
        manifest = await self.fixture_corpus() if self.scale is Scale.FIXTURE else self.paper_corpus()
        manifest = await self.with_qualities(manifest)
        split = split_manifest(manifest, self.config.split.ratios, self.config.split.seed, self.logger)
        await self.pipeline.save_manifest(manifest, self.out_dir / MANIFEST_FILE)
        await self.pipeline.save_split(split, self.out_dir / SPLIT_FILE)
        return manifest, split

    # Conditions

    def train_row(self, label: str, condition: DatasetManifest, split: SplitAssignment) -> RowCondition:
        bind_context(experiment=self.name, condition=label)
        slug = label.replace(" ", "_").replace("\\", "_")
        result = self.pipeline.train_condition(
            condition, split, self.config.model, self.config.train,
            self.out_dir / "checkpoints" / slug, self.frame_source, condition=label,
        )
        self.checkpoints[label] = result.best_checkpoint
        network, header = load_checkpoint(result.best_checkpoint)
        return RowCondition(label=label, model=network, checkpoint_id=header.checkpoint_id)

    def test_column(self, label: str, condition: DatasetManifest, split: SplitAssignment) -> ColumnCondition:
        return ColumnCondition(label=label, records=split.records(condition, Split.TEST), split_id=f"{label}:test")

    def cell_accuracy(self, row: RowCondition, column: ColumnCondition) -> float:
        report = evaluate_records(row.model, column.records, self.frame_source,
                                  checkpoint_id=row.checkpoint_id, split_id=column.split_id,
                                  threshold=self.config.eval.threshold, logger=self.logger)
        self.logger.log_matrix_cell_complete(row.label, column.label, report.frame_accuracy)
        return report.frame_accuracy

    def matched(self, manifest: DatasetManifest, split: SplitAssignment) -> ConditionMatrix:
        """Rows are datasets (plus the union row), columns qualities; each cell trains its own model."""
        datasets: List[Tuple[str, Sequence[SubDataset]]] = [
            (sub_dataset.value, [sub_dataset]) for sub_dataset in self.recipe.sub_datasets
        ]
        if self.recipe.include_union:
            datasets.append((DEEPSTREETS, list(self.recipe.sub_datasets)))
        cells = []
        for row_label, subs in datasets:
            values = []
            for quality in self.recipe.qualities:
                condition = select(manifest, subs, [quality])
                row = self.train_row(f"{row_label} {quality.value}", condition, split)
                column = self.test_column(f"{row_label} {quality.value}", condition, split)
                values.append(self.cell_accuracy(row, column))
            cells.append(values)
        return ConditionMatrix(
            title=f"Detection accuracy, matched conditions ({self.scale.value} scale)",
            corner_label="Dataset\\Quality",
            row_labels=[label for label, _ in datasets],
            column_labels=[quality.value for quality in self.recipe.qualities],
            cells=cells,
        )

    def compression_mismatch(self, manifest: DatasetManifest, split: SplitAssignment) -> ConditionMatrix:
        conditions = [
            (quality.value, select(manifest, self.recipe.sub_datasets, [quality]))
            for quality in self.recipe.qualities
        ]
        rows = [self.train_row(label, condition, split) for label, condition in conditions]
        columns = [self.test_column(label, condition, split) for label, condition in conditions]
        return run_condition_matrix(rows, columns, self.frame_source, self.config.eval.threshold,
                                    f"Compression mismatch ({self.scale.value} scale)",
                                    "Training\\Testing", self.logger)

    def cross_dataset(self, manifest: DatasetManifest, split: SplitAssignment) -> ConditionMatrix:
        quality = self.recipe.qualities[0]
        conditions = [
            (sub_dataset.value, select(manifest, [sub_dataset], [quality]))
            for sub_dataset in self.recipe.sub_datasets
        ]
        rows = [self.train_row(label, condition, split) for label, condition in conditions]
        columns = [self.test_column(label, condition, split) for label, condition in conditions]
        return run_condition_matrix(rows, columns, self.frame_source, self.config.eval.threshold,
                                    f"Cross-dataset analysis, {quality.value} videos ({self.scale.value} scale)",
                                    "Training\\Testing", self.logger)

    def unseen_generator(self, manifest: DatasetManifest, split: SplitAssignment) -> ConditionMatrix:
        recipe = self.recipe
        quality_manifest = select(manifest, qualities=[recipe.qualities[0]])
        population = quality_manifest.model_copy(update={
            "records": training_records(quality_manifest, recipe.real_source, recipe.fake_source),
        })
        row = self.train_row(unseen_row_label(recipe), population, split)
        matched = self.cell_accuracy(row, self.test_column("matched test", population, split))
        heldout = run_unseen_generator_eval(
            row.model, quality_manifest, split, recipe.fake_source, recipe.real_source, recipe.heldout_fakes,
            self.frame_source, row.checkpoint_id, self.config.eval.threshold, self.logger,
        )
        return ConditionMatrix(
            title=f"Unseen generator ({self.scale.value} scale)",
            corner_label="Training\\Testing",
            row_labels=[row.label],
            column_labels=unseen_column_labels(recipe),
            cells=[[matched, heldout.frame_accuracy]],
        )

    def reference(self) -> Optional[ConditionMatrix]:
        """Published values for this experiment, rendered beside the measured ones."""
        if self.recipe.kind is ExperimentKind.UNSEEN_GENERATOR:
            return unseen_reference(self.recipe)
        return REFERENCE_TABLES.get(self.name)

    async def run(self, format: ReportFormat = ReportFormat.TEXT) -> ExperimentOutcome:
        manifest, split = await self.corpus()
        runners = {
            ExperimentKind.MATCHED: self.matched,
            ExperimentKind.COMPRESSION_MISMATCH: self.compression_mismatch,
            ExperimentKind.CROSS_DATASET: self.cross_dataset,
            ExperimentKind.UNSEEN_GENERATOR: self.unseen_generator,
        }
        matrix = runners[self.recipe.kind](manifest, split)
        reference = self.reference()

        paths = [await self.pipeline.save_text(render_report(matrix, format),
                                               report_path(self.out_dir, self.name, format))]
        if reference is not None:
            paths.append(await self.pipeline.save_text(
                render_report(reference, format), report_path(self.out_dir, f"{self.name}_reference", format)
            ))
        return ExperimentOutcome(self.name, self.scale, matrix, reference, paths, dict(self.checkpoints))


async def reproduce_experiment(pipeline: DetectionPipeline,
                               name: str,
                               scale: Scale | str,
                               out_dir: Path,
                               config: Optional[RunConfig] = None,
                               format: ReportFormat = ReportFormat.TEXT) -> ExperimentOutcome:
    """Run one shipped experiment recipe; `config` replaces the shipped recipe when given."""
    config = config or load_recipe(name, scale)
    return await ExperimentRunner(pipeline, name, config, Scale(scale), out_dir).run(format)
