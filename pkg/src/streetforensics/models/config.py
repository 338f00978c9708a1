from enum import Enum
from fractions import Fraction
from typing import Any, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .evaluation import DEFAULT_THRESHOLD, AggregationPolicy
from .video import Quality, SubDataset

DOWNSAMPLING_FACTOR = 32

DEFAULT_SPLIT_RATIOS = (0.60, 0.25, 0.15)


def split_list(value: Any) -> Any:
    """Accept comma-separated strings from key=value files for list fields."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ModelConfig(BaseModel):
    """Topology of the Xception-style detector; defaults are the full-size network."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    input_height: int = Field(256, ge=DOWNSAMPLING_FACTOR)
    input_width: int = Field(512, ge=DOWNSAMPLING_FACTOR)
    width_multiplier: float = Field(1.0, gt=0)
    middle_module_count: int = Field(8, ge=0)
    num_classes: Literal[2] = 2
    seed: int = 0

    @field_validator("width_multiplier", mode="before")
    @classmethod
    def parse_fraction(cls, v: Any) -> Any:
        if isinstance(v, str) and "/" in v:
            return float(Fraction(v.strip()))
        return v

    @model_validator(mode="after")
    def check_geometry(self) -> "ModelConfig":
        for name in ("input_height", "input_width"):
            if getattr(self, name) % DOWNSAMPLING_FACTOR:
                raise ValueError(f"{name} must be divisible by {DOWNSAMPLING_FACTOR}")
        return self

    def channels(self, base: int) -> int:
        return max(1, int(round(base * self.width_multiplier)))


class TrainConfig(BaseModel):
    """Optimization recipe: Adam hyperparameters, batch size and early stopping."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(1e-4, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    epsilon: float = Field(1e-8, gt=0)
    batch_size: int = Field(8, ge=1)
    patience: int = Field(10, ge=1)
    max_epochs: int = Field(..., ge=1)
    seed: int = 0


class SplitConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    ratios: Tuple[float, float, float] = DEFAULT_SPLIT_RATIOS
    seed: int = 0

    @field_validator("ratios", mode="before")
    @classmethod
    def split_ratio_list(cls, v: Any) -> Any:
        return split_list(v)

    @field_validator("ratios")
    @classmethod
    def check_ratios(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(ratio <= 0 for ratio in v):
            raise ValueError("every split ratio must be positive")
        if abs(sum(v) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(v):g}")
        return v


class ArtifactType(str, Enum):
    CHECKERBOARD = "checkerboard"
    SPECTRAL_NOTCH = "spectral_notch"
    TEXTURE_SMOOTHING = "texture_smoothing"


class FixtureConfig(BaseModel):
    """Synthetic fixture corpus: paired real/fake scenes with one injected artifact family."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_videos_per_class: int = Field(40, ge=1)
    frames_per_video: int = Field(30, ge=1)
    width: int = Field(128, ge=DOWNSAMPLING_FACTOR)
    height: int = Field(64, ge=DOWNSAMPLING_FACTOR)
    artifact_type: ArtifactType = ArtifactType.CHECKERBOARD
    artifact_strength: float = Field(0.5, gt=0, le=1)
    seed: int = 0
    fps: float = Field(10.0, gt=0)

    @model_validator(mode="after")
    def check_dimensions(self) -> "FixtureConfig":
        for name in ("width", "height"):
            if getattr(self, name) % DOWNSAMPLING_FACTOR:
                raise ValueError(f"{name} must be divisible by {DOWNSAMPLING_FACTOR}")
        return self


class Subcommand(str, Enum):
    INGEST = "ingest"
    SYNTH = "synth"
    COMPRESS = "compress"
    SPLIT = "split"
    TRAIN = "train"
    EVAL = "eval"
    MATRIX = "matrix"
    REPORT = "report"
    REPRODUCE = "reproduce"


class RunSpec(BaseModel):
    """One CLI invocation after argument parsing."""

    subcommand: Subcommand
    config_path: Optional[str] = None
    output_dir: str
    seed_override: Optional[int] = None
    verbosity: int = Field(0, ge=0)


class ExperimentKind(str, Enum):
    MATCHED = "matched"
    COMPRESSION_MISMATCH = "compression_mismatch"
    CROSS_DATASET = "cross_dataset"
    UNSEEN_GENERATOR = "unseen_generator"


class ExperimentRecipe(BaseModel):
    """Shipped experiment definition shared by paper and fixture scale."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str
    kind: ExperimentKind
    sub_datasets: List[SubDataset] = Field(
        default_factory=lambda: [SubDataset.CITYVID, SubDataset.CITYWCVID, SubDataset.KITTIVID]
    )
    qualities: List[Quality] = Field(default_factory=lambda: [Quality.RAW])
    include_union: bool = False
    real_source: Optional[SubDataset] = None
    fake_source: Optional[SubDataset] = None
    heldout_fakes: Optional[SubDataset] = None
    description: str = ""

    @field_validator("sub_datasets", "qualities", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return split_list(v)

    @model_validator(mode="after")
    def check_sources(self) -> "ExperimentRecipe":
        if self.kind is ExperimentKind.UNSEEN_GENERATOR:
            if None in (self.real_source, self.fake_source, self.heldout_fakes):
                raise ValueError("unseen_generator needs real_source, fake_source and heldout_fakes")
        return self


class CorpusConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    root: Optional[str] = None
    pattern: Optional[str] = None
    permissive: bool = False


class DataConfig(BaseModel):
    """Inputs of the train/eval stages and the condition they are restricted to."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    manifest: Optional[str] = None
    split: Optional[str] = None
    cache_dir: Optional[str] = None
    sub_datasets: Optional[List[SubDataset]] = None
    qualities: Optional[List[Quality]] = None
    max_concurrency: int = Field(4, ge=1)

    @field_validator("sub_datasets", "qualities", mode="before")
    @classmethod
    def split_lists(cls, v: Any) -> Any:
        return split_list(v)


class EvalConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    checkpoint: Optional[str] = None
    policy: AggregationPolicy = AggregationPolicy.MAJORITY
    threshold: float = Field(DEFAULT_THRESHOLD, ge=0, le=1)
    max_workers: int = Field(4, ge=1)
    batch_size: int = Field(32, ge=1)


class RunConfig(BaseModel):
    """Everything one invocation reads from its config file, grouped by dotted section."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: Optional[int] = None
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    split: SplitConfig = Field(default_factory=SplitConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: Optional[TrainConfig] = None
    fixture: FixtureConfig = Field(default_factory=FixtureConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    experiment: Optional[ExperimentRecipe] = None

    def seeded(self, seed: Optional[int]) -> "RunConfig":
        """Route one seed into every seeded section; None keeps the file's values."""
        seed = self.seed if seed is None else seed
        if seed is None:
            return self
        update = {
            "seed": seed,
            "split": self.split.model_copy(update={"seed": seed}),
            "model": self.model.model_copy(update={"seed": seed}),
            "fixture": self.fixture.model_copy(update={"seed": seed}),
        }
        if self.train is not None:
            update["train"] = self.train.model_copy(update={"seed": seed})
        return self.model_copy(update=update)
