from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .video import Label, Quality, SubDataset

DEFAULT_THRESHOLD = 0.5


class FramePrediction(BaseModel):
    """Detector output for one frame; ties at the threshold are labeled fake."""

    model_config = ConfigDict(frozen=True)

    video_id: str
    frame_index: int = Field(..., ge=0)
    score_fake: float = Field(..., ge=0.0, le=1.0)
    predicted_label: Label

    @classmethod
    def from_score(cls,
                   video_id: str,
                   frame_index: int,
                   score_fake: float,
                   threshold: float = DEFAULT_THRESHOLD) -> "FramePrediction":
        label = Label.FAKE if score_fake >= threshold else Label.REAL
        return cls(video_id=video_id, frame_index=frame_index, score_fake=score_fake, predicted_label=label)


class ConfusionCounts(BaseModel):
    """Binary confusion counts with fake as the positive class."""

    model_config = ConfigDict(frozen=True)

    tp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def correct(self) -> int:
        return self.tp + self.tn

    def accuracy(self) -> float:
        """Plain accuracy in percent."""
        if self.total == 0:
            raise ValueError("accuracy of an empty confusion matrix is undefined")
        return 100.0 * (self.tp + self.tn) / self.total

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )

    @classmethod
    def of(cls, truth: Label, predicted: Label) -> "ConfusionCounts":
        if truth is Label.FAKE:
            return cls(tp=1) if predicted is Label.FAKE else cls(fn=1)
        return cls(fp=1) if predicted is Label.FAKE else cls(tn=1)


class AggregationPolicy(str, Enum):
    MAJORITY = "majority"
    MEAN_SCORE = "mean_score"


class VideoResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    video_id: str
    label: Label
    sub_dataset: SubDataset
    quality: Quality
    frames: int
    correct_frames: int
    mean_score_fake: float
    video_labels: Dict[AggregationPolicy, Label]


class BreakdownRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    sub_dataset: SubDataset
    quality: Quality
    counts: ConfusionCounts

    @computed_field
    @property
    def accuracy(self) -> float:
        return self.counts.accuracy()


class EvalReport(BaseModel):
    """Per-frame and per-video results of one checkpoint on one test split."""

    frame_counts: ConfusionCounts
    video_counts: Dict[AggregationPolicy, ConfusionCounts] = Field(default_factory=dict)
    breakdown: List[BreakdownRow] = Field(default_factory=list)
    videos: List[VideoResult] = Field(default_factory=list)
    checkpoint_id: str = "unknown"
    split_id: str = "unknown"
    accuracy_level: str = "per-frame (video-level aggregates reported alongside)"
    notes: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def frame_accuracy(self) -> Optional[float]:
        return self.frame_counts.accuracy() if self.frame_counts.total else None

    @computed_field
    @property
    def video_accuracy(self) -> Dict[str, float]:
        return {
            policy.value: counts.accuracy()
            for policy, counts in self.video_counts.items()
            if counts.total
        }


class ConditionMatrix(BaseModel):
    """Accuracy (percent) of each training condition (row) on each test condition (column)."""

    corner_label: str = "Training\\Testing"
    row_labels: List[str]
    column_labels: List[str]
    cells: List[List[float]]
    title: Optional[str] = None

    @model_validator(mode="after")
    def check_shape(self) -> "ConditionMatrix":
        if len(self.cells) != len(self.row_labels):
            raise ValueError("one row of cells per row label is required")
        for row in self.cells:
            if len(row) != len(self.column_labels):
                raise ValueError("matrix is not rectangular")
            for value in row:
                if not 0.0 <= value <= 100.0:
                    raise ValueError(f"accuracy {value} outside [0, 100]")
        return self

    def cell(self, row: str, column: str) -> float:
        return self.cells[self.row_labels.index(row)][self.column_labels.index(column)]

    def diagonal(self) -> List[float]:
        return [self.cell(label, label) for label in self.row_labels if label in self.column_labels]
