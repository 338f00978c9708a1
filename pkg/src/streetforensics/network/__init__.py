from .descriptor import (
    ArchitectureDescriptor,
    ConvKind,
    ConvLayerSpec,
    Flow,
    ModuleSpec,
    ResidualKind,
    describe,
)
from .layers import SeparableConv2d, separable_conv
from .xception import DetectorNetwork, build_network, initialize, parameter_count
from .inference import (
    fake_scores,
    forward,
    predict_frame,
    predict_frames,
    prediction_from_logits,
    to_batch,
)
from .checkpoint import (
    CheckpointHeader,
    load_checkpoint,
    load_weights,
    read_checkpoint,
    save_checkpoint,
)

__all__ = [
    "ArchitectureDescriptor",
    "ConvKind",
    "ConvLayerSpec",
    "Flow",
    "ModuleSpec",
    "ResidualKind",
    "describe",
    "SeparableConv2d",
    "separable_conv",
    "DetectorNetwork",
    "build_network",
    "initialize",
    "parameter_count",
    "fake_scores",
    "forward",
    "predict_frame",
    "predict_frames",
    "prediction_from_logits",
    "to_batch",
    "CheckpointHeader",
    "load_checkpoint",
    "load_weights",
    "read_checkpoint",
    "save_checkpoint",
]
