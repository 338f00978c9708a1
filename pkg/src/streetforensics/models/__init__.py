from .video import (
    DEEPSTREETS,
    QUALITY_LEVELS,
    SUB_DATASET_PROVENANCE,
    EncodingParams,
    Label,
    Quality,
    QualityLevel,
    SubDataset,
    VideoRecord,
)
from .manifest import (
    DatasetManifest,
    ExcludedVideo,
    Finding,
    FindingKind,
    Split,
    SplitAssignment,
    ValidationReport,
)
from .config import (
    DEFAULT_SPLIT_RATIOS,
    ArtifactType,
    CorpusConfig,
    DataConfig,
    EvalConfig,
    ExperimentKind,
    ExperimentRecipe,
    FixtureConfig,
    ModelConfig,
    RunConfig,
    RunSpec,
    SplitConfig,
    Subcommand,
    TrainConfig,
)
from .evaluation import (
    DEFAULT_THRESHOLD,
    AggregationPolicy,
    BreakdownRow,
    ConditionMatrix,
    ConfusionCounts,
    EvalReport,
    FramePrediction,
    VideoResult,
)

__all__ = [
    "DEEPSTREETS",
    "QUALITY_LEVELS",
    "SUB_DATASET_PROVENANCE",
    "EncodingParams",
    "Label",
    "Quality",
    "QualityLevel",
    "SubDataset",
    "VideoRecord",
    "DatasetManifest",
    "ExcludedVideo",
    "Finding",
    "FindingKind",
    "Split",
    "SplitAssignment",
    "ValidationReport",
    "DEFAULT_SPLIT_RATIOS",
    "ArtifactType",
    "CorpusConfig",
    "DataConfig",
    "EvalConfig",
    "ExperimentKind",
    "ExperimentRecipe",
    "FixtureConfig",
    "ModelConfig",
    "RunConfig",
    "RunSpec",
    "SplitConfig",
    "Subcommand",
    "TrainConfig",
    "DEFAULT_THRESHOLD",
    "AggregationPolicy",
    "BreakdownRow",
    "ConditionMatrix",
    "ConfusionCounts",
    "EvalReport",
    "FramePrediction",
    "VideoResult",
]
