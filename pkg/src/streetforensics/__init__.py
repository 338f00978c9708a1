"""Toolkit for detecting GAN-synthesized driving-street videos."""

__version__ = "0.1.0"

from .models import (
    DatasetManifest,
    EvalReport,
    ConditionMatrix,
    FixtureConfig,
    ModelConfig,
    SplitAssignment,
    TrainConfig,
    VideoRecord,
)
from .core import DetectionPipeline, PipelineFactory, reproduce_experiment
from .cli import run

__all__ = [
    "__version__",
    "DatasetManifest",
    "EvalReport",
    "ConditionMatrix",
    "FixtureConfig",
    "ModelConfig",
    "SplitAssignment",
    "TrainConfig",
    "VideoRecord",
    "DetectionPipeline",
    "PipelineFactory",
    "reproduce_experiment",
    "run",
]
