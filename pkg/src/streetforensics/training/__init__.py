from .loss import LossOutput, compute_loss
from .optimizer import OptimizerState, adam_step
from .early_stopping import EarlyStopping
from .data import FrameSet, load_split_frames
from .log import TrainingLog, TrainingLogEntry
from .trainer import (
    BEST_CHECKPOINT,
    LAST_CHECKPOINT,
    StopReason,
    TrainingResult,
    train,
    validation_pass,
)

__all__ = [
    "LossOutput",
    "compute_loss",
    "OptimizerState",
    "adam_step",
    "EarlyStopping",
    "FrameSet",
    "load_split_frames",
    "TrainingLog",
    "TrainingLogEntry",
    "BEST_CHECKPOINT",
    "LAST_CHECKPOINT",
    "StopReason",
    "TrainingResult",
    "train",
    "validation_pass",
]
