import math

import torch
import torch.nn as nn

from ..errors import ShapeMismatchError
from ..models import ModelConfig
from .descriptor import ArchitectureDescriptor, describe
from .layers import XceptionModule


class DetectorNetwork(nn.Module):
    """Xception-style backbone, global average pooling and a two-output head.

    Output column 1 is the fake class.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.descriptor: ArchitectureDescriptor = describe(config)
        self.features = nn.Sequential(*(XceptionModule(spec) for spec in self.descriptor.modules))
        self.head = nn.Linear(self.descriptor.feature_channels, config.num_classes)

    @property
    def input_shape(self) -> tuple:
        return (3, self.config.input_height, self.config.input_width)

    def check_input(self, batch: torch.Tensor) -> None:
        if batch.dim() != 4 or tuple(batch.shape[1:]) != self.input_shape:
            raise ShapeMismatchError(
                f"expected a batch shaped (N, {', '.join(map(str, self.input_shape))}), "
                f"got {tuple(batch.shape)}"
            )
        if batch.shape[0] == 0:
            raise ShapeMismatchError("batch is empty")

    def forward(self, batch: torch.Tensor) -> torch.Tensor:
        self.check_input(batch)
        features = self.features(batch)
        pooled = features.mean(dim=(2, 3))
        return self.head(pooled)


def initialize(network: nn.Module, seed: int) -> None:
    """Seeded fan-in uniform initialization.

    Convolutions draw from U(-sqrt(6/fan_in), sqrt(6/fan_in)), the head from
    U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with zero bias; batch norm starts at
    scale 1, offset 0. Parameters are visited in registration order.
    """
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for module in network.modules():
            if isinstance(module, nn.Conv2d):
                fan_in = module.weight[0].numel()
                bound = math.sqrt(6.0 / fan_in)
                module.weight.copy_(torch.empty_like(module.weight).uniform_(-bound, bound, generator=generator))
            elif isinstance(module, nn.Linear):
                bound = 1.0 / math.sqrt(module.in_features)
                module.weight.copy_(torch.empty_like(module.weight).uniform_(-bound, bound, generator=generator))
                module.bias.zero_()
            elif isinstance(module, nn.BatchNorm2d):
                module.reset_running_stats()
                module.weight.fill_(1.0)
                module.bias.zero_()


def build_network(config: ModelConfig) -> DetectorNetwork:
    """Build and initialize the detector; same config and seed give bit-identical parameters."""
    network = DetectorNetwork(config)
    initialize(network, config.seed)
    return network


def parameter_count(network: nn.Module) -> int:
    return sum(parameter.numel() for parameter in network.parameters())
