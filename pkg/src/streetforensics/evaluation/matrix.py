from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import MatrixSpecError
from ..infrastructure import PipelineLogger, build_config, nest_dotted, read_key_value_file
from ..media.frame_source import FrameSource
from ..models import DEFAULT_THRESHOLD, ConditionMatrix, Quality, SubDataset, VideoRecord
from ..models.config import split_list
from ..network import DetectorNetwork
from .evaluator import FramePredictor, evaluate_records


class MatrixSpec(BaseModel):
    """Rows are training conditions (one checkpoint each), columns test conditions.

    Flat file form::

        rows = RAW, HQ, LQ
        columns = RAW, HQ, LQ
        checkpoint.RAW = runs/raw/best.ckpt
        manifest.RAW = data/raw/manifest.jsonl
        split.RAW = data/raw/split.jsonl
        quality.RAW = RAW

    Relative paths resolve against the spec file's directory. The optional
    `quality` and `sub_dataset` entries restrict a column's test videos.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    title: Optional[str] = None
    corner_label: str = "Training\\Testing"
    rows: List[str] = Field(..., min_length=1)
    columns: List[str] = Field(..., min_length=1)
    checkpoint: Dict[str, str] = Field(default_factory=dict)
    manifest: Dict[str, str] = Field(default_factory=dict)
    split: Dict[str, str] = Field(default_factory=dict)
    quality: Dict[str, Quality] = Field(default_factory=dict)
    sub_dataset: Dict[str, SubDataset] = Field(default_factory=dict)

    @field_validator("rows", "columns", mode="before")
    @classmethod
    def label_lists(cls, v):
        return split_list(v)

    @model_validator(mode="after")
    def check_labels(self) -> "MatrixSpec":
        for name in ("rows", "columns"):
            labels = getattr(self, name)
            if len(set(labels)) != len(labels):
                raise ValueError(f"{name} contain duplicate labels")
        return self

    def resolve(self, base_dir: Path) -> "MatrixSpec":
        def absolute(paths: Dict[str, str]) -> Dict[str, str]:
            return {key: str((base_dir / value).resolve()) for key, value in paths.items()}

        return self.model_copy(update={
            "checkpoint": absolute(self.checkpoint),
            "manifest": absolute(self.manifest),
            "split": absolute(self.split),
        })

    def check_complete(self) -> None:
        """Raise MatrixSpecError naming the first cell without a checkpoint or test split."""
        for row in self.rows:
            if row not in self.checkpoint:
                raise MatrixSpecError(row, self.columns[0], f"no checkpoint for training condition '{row}'")
            if not Path(self.checkpoint[row]).exists():
                raise MatrixSpecError(row, self.columns[0], f"checkpoint not found: {self.checkpoint[row]}")
        for column in self.columns:
            for kind in ("manifest", "split"):
                paths = getattr(self, kind)
                if column not in paths:
                    raise MatrixSpecError(self.rows[0], column, f"no test {kind} for condition '{column}'")
                if not Path(paths[column]).exists():
                    raise MatrixSpecError(self.rows[0], column, f"test {kind} not found: {paths[column]}")


def load_matrix_spec(path: str | Path) -> MatrixSpec:
    spec_path = Path(path)
    spec = build_config(MatrixSpec, nest_dotted(read_key_value_file(spec_path)))
    return spec.resolve(spec_path.parent)


@dataclass(frozen=True)
class RowCondition:
    label: str
    model: Optional[DetectorNetwork | FramePredictor]
    checkpoint_id: str = "unknown"


@dataclass(frozen=True)
class ColumnCondition:
    label: str
    records: Optional[Sequence[VideoRecord]]
    split_id: str = "unknown"


def run_condition_matrix(rows: Sequence[RowCondition],
                         columns: Sequence[ColumnCondition],
                         frame_source: Optional[FrameSource] = None,
                         threshold: float = DEFAULT_THRESHOLD,
                         title: Optional[str] = None,
                         corner_label: str = "Training\\Testing",
                         logger: Optional[PipelineLogger] = None) -> ConditionMatrix:
    """Cell (r, c) is the per-frame accuracy of row r's checkpoint on column c's test videos."""
    if not rows or not columns:
        raise MatrixSpecError("*", "*", "a matrix needs at least one row and one column")
    for row in rows:
        if row.model is None:
            raise MatrixSpecError(row.label, columns[0].label, "no checkpoint for this training condition")
    for column in columns:
        if not column.records:
            raise MatrixSpecError(rows[0].label, column.label, "no test videos for this condition")
    logger = logger or PipelineLogger()

    cells: List[List[float]] = []
    for row in rows:
        values = []
        for column in columns:
            report = evaluate_records(row.model, column.records, frame_source,
                                      checkpoint_id=row.checkpoint_id, split_id=column.split_id,
                                      threshold=threshold, logger=logger)
            values.append(report.frame_accuracy)
            logger.log_matrix_cell_complete(row.label, column.label, report.frame_accuracy)
        cells.append(values)

    return ConditionMatrix(
        corner_label=corner_label,
        row_labels=[row.label for row in rows],
        column_labels=[column.label for column in columns],
        cells=cells,
        title=title,
    )
