from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from ..models import ModelConfig


class Flow(str, Enum):
    ENTRY = "entry"
    MIDDLE = "middle"
    EXIT = "exit"


class ConvKind(str, Enum):
    STANDARD = "standard"
    SEPARABLE = "separable"


class ResidualKind(str, Enum):
    NONE = "none"
    IDENTITY = "identity"
    PROJECTION = "projection"


class ConvLayerSpec(BaseModel):
    """One feature-extraction convolution, always followed by batch normalization."""

    model_config = ConfigDict(frozen=True)

    kind: ConvKind
    in_channels: int = Field(..., ge=1)
    out_channels: int = Field(..., ge=1)
    kernel_size: int = 3
    stride: int = 1
    relu_before: bool = False
    relu_after: bool = False

    def parameter_count(self) -> int:
        k = self.kernel_size
        if self.kind is ConvKind.SEPARABLE:
            weights = self.in_channels * k * k + self.out_channels * self.in_channels
        else:
            weights = self.out_channels * self.in_channels * k * k
        return weights + 2 * self.out_channels


class ModuleSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    flow: Flow
    convs: List[ConvLayerSpec]
    residual: ResidualKind
    pooled: bool = False

    @property
    def in_channels(self) -> int:
        return self.convs[0].in_channels

    @property
    def out_channels(self) -> int:
        return self.convs[-1].out_channels

    def shortcut_parameter_count(self) -> int:
        if self.residual is not ResidualKind.PROJECTION:
            return 0
        return self.out_channels * self.in_channels + 2 * self.out_channels


class ArchitectureDescriptor(BaseModel):
    """Layer-by-layer description of the detector derived from a ModelConfig."""

    model_config = ConfigDict(frozen=True)

    input_height: int
    input_width: int
    modules: List[ModuleSpec]
    feature_channels: int
    num_classes: int

    @property
    def module_count(self) -> int:
        return len(self.modules)

    @property
    def conv_layer_count(self) -> int:
        """Feature-extraction convolutions; 1x1 projection shortcuts are not counted."""
        return sum(len(module.convs) for module in self.modules)

    def residual_modules(self) -> List[int]:
        return [module.index for module in self.modules if module.residual is not ResidualKind.NONE]

    def parameter_count(self) -> int:
        """Trainable parameters: convolution kernels, batch-norm scales and offsets, head."""
        backbone = sum(
            sum(conv.parameter_count() for conv in module.convs) + module.shortcut_parameter_count()
            for module in self.modules
        )
        head = self.feature_channels * self.num_classes + self.num_classes
        return backbone + head

    def output_stride(self) -> int:
        stride = 1
        for module in self.modules:
            for conv in module.convs:
                stride *= conv.stride
            if module.pooled:
                stride *= 2
        return stride


def _separable(in_channels: int, out_channels: int, relu_before: bool = True,
               relu_after: bool = False) -> ConvLayerSpec:
    return ConvLayerSpec(kind=ConvKind.SEPARABLE, in_channels=in_channels, out_channels=out_channels,
                         relu_before=relu_before, relu_after=relu_after)


def describe(config: ModelConfig) -> ArchitectureDescriptor:
    """Entry flow (4 modules), `middle_module_count` middle modules, exit flow (2 modules)."""
    c = config.channels
    modules: List[ModuleSpec] = []

    stem = [
        ConvLayerSpec(kind=ConvKind.STANDARD, in_channels=3, out_channels=c(32), stride=2, relu_after=True),
        ConvLayerSpec(kind=ConvKind.STANDARD, in_channels=c(32), out_channels=c(64), relu_after=True),
    ]
    modules.append(ModuleSpec(index=1, flow=Flow.ENTRY, convs=stem, residual=ResidualKind.NONE))

    in_channels = c(64)
    for width, relu_first in ((128, False), (256, True), (728, True)):
        out_channels = c(width)
        modules.append(ModuleSpec(
            index=len(modules) + 1,
            flow=Flow.ENTRY,
            convs=[_separable(in_channels, out_channels, relu_before=relu_first),
                   _separable(out_channels, out_channels)],
            residual=ResidualKind.PROJECTION,
            pooled=True,
        ))
        in_channels = out_channels

    middle = c(728)
    for _ in range(config.middle_module_count):
        modules.append(ModuleSpec(
            index=len(modules) + 1,
            flow=Flow.MIDDLE,
            convs=[_separable(middle, middle) for _ in range(3)],
            residual=ResidualKind.IDENTITY,
        ))

    modules.append(ModuleSpec(
        index=len(modules) + 1,
        flow=Flow.EXIT,
        convs=[_separable(middle, middle), _separable(middle, c(1024))],
        residual=ResidualKind.PROJECTION,
        pooled=True,
    ))
    modules.append(ModuleSpec(
        index=len(modules) + 1,
        flow=Flow.EXIT,
        convs=[_separable(c(1024), c(1536), relu_before=False, relu_after=True),
               _separable(c(1536), c(2048), relu_before=False, relu_after=True)],
        residual=ResidualKind.NONE,
    ))

    return ArchitectureDescriptor(
        input_height=config.input_height,
        input_width=config.input_width,
        modules=modules,
        feature_channels=c(2048),
        num_classes=config.num_classes,
    )

