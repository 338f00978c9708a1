from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SubDataset(str, Enum):
    """Corpus partitions: the three generated sub-datasets plus synthetic fixtures."""
    CITYVID = "Cityvid"
    CITYWCVID = "Citywcvid"
    KITTIVID = "Kittivid"
    SYNTHETIC = "Synthetic"


class Label(str, Enum):
    REAL = "real"
    FAKE = "fake"

    @property
    def index(self) -> int:
        """Class index of the two-output head (fake is the positive class)."""
        return 1 if self is Label.FAKE else 0


class Quality(str, Enum):
    RAW = "RAW"
    HQ = "HQ"
    LQ = "LQ"


# Generator network and segmentation-mask source behind each sub-dataset.
SUB_DATASET_PROVENANCE = {
    SubDataset.CITYVID: ("vid2vid", "cityscapes"),
    SubDataset.CITYWCVID: ("wc-vid2vid", "cityscapes"),
    SubDataset.KITTIVID: ("vid2vid", "kitti"),
}

DEEPSTREETS = "DeepStreets"


class QualityLevel(BaseModel):
    """A compression level; RAW carries no rate parameter."""

    model_config = ConfigDict(frozen=True)

    name: Quality
    rate_parameter: Optional[int] = Field(None, ge=0, le=51, description="H.264 constant rate factor")

    @model_validator(mode="after")
    def check_rate_parameter(self) -> "QualityLevel":
        if self.name is Quality.RAW and self.rate_parameter is not None:
            raise ValueError("RAW has no rate parameter")
        if self.name is not Quality.RAW and self.rate_parameter is None:
            raise ValueError(f"{self.name.value} requires a rate parameter")
        return self

    @classmethod
    def of(cls, quality: "Quality | str") -> "QualityLevel":
        """Standard level for a quality name: HQ = CRF 23, LQ = CRF 40."""
        return QUALITY_LEVELS[Quality(quality)]


QUALITY_LEVELS = {
    Quality.RAW: QualityLevel(name=Quality.RAW),
    Quality.HQ: QualityLevel(name=Quality.HQ, rate_parameter=23),
    Quality.LQ: QualityLevel(name=Quality.LQ, rate_parameter=40),
}


class EncodingParams(BaseModel):
    """Encoder settings recorded alongside a compressed copy."""

    model_config = ConfigDict(frozen=True)

    codec: str = "h264"
    encoder: str = "libx264"
    rate_mode: str = "crf"
    rate_value: int
    pixel_format: str = "yuv420p"


class VideoRecord(BaseModel):
    """Provenance, label, quality and media metadata of one video."""

    model_config = ConfigDict(frozen=True)

    video_id: str = Field(..., min_length=1)
    path: str = Field(..., min_length=1)
    sub_dataset: SubDataset
    label: Label
    quality: Quality
    frame_count: int = Field(..., ge=1)
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    fps: float = Field(..., gt=0)
    source_id: Optional[str] = Field(None, description="RAW video this copy was derived from")
    generator: Optional[str] = None
    mask_source: Optional[str] = None
    encoding: Optional[EncodingParams] = None

    @field_validator("video_id")
    @classmethod
    def validate_video_id(cls, v: str) -> str:
        if v != v.strip():
            raise ValueError("video_id cannot have surrounding whitespace")
        return v

    @property
    def group_id(self) -> str:
        """Id shared by every quality copy of the same source video."""
        return self.source_id or self.video_id
