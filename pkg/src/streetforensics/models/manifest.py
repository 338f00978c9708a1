from collections import Counter
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .video import Label, Quality, SubDataset, VideoRecord

MANIFEST_SCHEMA_VERSION = 1
SPLIT_SCHEMA_VERSION = 1


class ExcludedVideo(BaseModel):
    """A discovered file left out of the manifest because it could not be probed."""

    model_config = ConfigDict(frozen=True)

    path: str
    reason: str


class DatasetManifest(BaseModel):
    """Ordered collection of video records.

    Duplicate ids are representable so that validation can report them;
    operations that need unique ids call `require_unique_ids`.
    """

    model_config = ConfigDict(frozen=True)

    records: List[VideoRecord] = Field(default_factory=list)
    source_description: str = ""
    schema_version: int = MANIFEST_SCHEMA_VERSION
    provenance: Optional[Dict[str, Any]] = None
    excluded: List[ExcludedVideo] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def duplicate_ids(self) -> List[str]:
        counts = Counter(record.video_id for record in self.records)
        return sorted(video_id for video_id, count in counts.items() if count > 1)

    def require_unique_ids(self) -> None:
        from ..errors import ManifestError

        duplicates = self.duplicate_ids()
        if duplicates:
            raise ManifestError(f"duplicate video_id in manifest: {', '.join(duplicates[:5])}")

    def label_counts(self) -> Dict[Label, int]:
        counts = Counter(record.label for record in self.records)
        return {label: counts.get(label, 0) for label in Label}

    def strata(self) -> Dict[Tuple[SubDataset, Quality], Dict[Label, int]]:
        """Label counts per (sub_dataset, quality) group, in first-seen order."""
        groups: Dict[Tuple[SubDataset, Quality], Dict[Label, int]] = {}
        for record in self.records:
            key = (record.sub_dataset, record.quality)
            counts = groups.setdefault(key, {label: 0 for label in Label})
            counts[record.label] += 1
        return groups


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class SplitAssignment(BaseModel):
    """Video-level train/val/test partition of a manifest."""

    model_config = ConfigDict(frozen=True)

    assignments: Dict[str, Split]
    seed: int
    ratios: Tuple[float, float, float]
    schema_version: int = SPLIT_SCHEMA_VERSION

    @field_validator("ratios")
    @classmethod
    def validate_ratios(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(ratio <= 0 for ratio in v):
            raise ValueError("every split ratio must be positive")
        if abs(sum(v) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(v)!r}")
        return v

    def video_ids(self, split: Split) -> List[str]:
        return [video_id for video_id, assigned in self.assignments.items() if assigned is split]

    def counts(self) -> Dict[str, int]:
        counts = Counter(self.assignments.values())
        return {split.value: counts.get(split, 0) for split in Split}

    def records(self, manifest: DatasetManifest, split: Split) -> List[VideoRecord]:
        """Records of `manifest` assigned to `split`, in manifest order."""
        return [
            record for record in manifest.records
            if self.assignments.get(record.video_id) is split
        ]


class FindingKind(str, Enum):
    DUPLICATE_ID = "duplicate_id"
    MISSING_FILE = "missing_file"
    METADATA_MISMATCH = "metadata_mismatch"
    LABEL_IMBALANCE = "label_imbalance"
    UNREADABLE = "unreadable"


class Finding(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FindingKind
    subject: str = Field(..., description="video_id, or stratum name for imbalance findings")
    detail: str = ""


class ValidationReport(BaseModel):
    findings: List[Finding] = Field(default_factory=list)
    records_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.findings

    def of_kind(self, kind: FindingKind) -> List[Finding]:
        return [finding for finding in self.findings if finding.kind is kind]
