import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ShapeMismatchError
from .descriptor import ConvKind, ConvLayerSpec, ModuleSpec, ResidualKind


def separable_conv(input: torch.Tensor, depthwise: torch.Tensor, pointwise: torch.Tensor) -> torch.Tensor:
    """Per-channel spatial convolution, then a 1x1 cross-channel convolution.

    input: (N, C, H, W); depthwise: (C, 1, k, k) with odd k; pointwise: (O, C, 1, 1).
    Zero padding keeps the spatial size.
    """
    if input.dim() != 4:
        raise ShapeMismatchError(f"expected an (N, C, H, W) input, got shape {tuple(input.shape)}")
    channels = input.shape[1]
    if depthwise.dim() != 4 or depthwise.shape[0] != channels or depthwise.shape[1] != 1:
        raise ShapeMismatchError(
            f"depthwise kernel must be ({channels}, 1, k, k), got {tuple(depthwise.shape)}"
        )
    if depthwise.shape[2] != depthwise.shape[3] or depthwise.shape[2] % 2 == 0:
        raise ShapeMismatchError(f"depthwise kernel must be square and odd, got {tuple(depthwise.shape)}")
    if pointwise.dim() != 4 or pointwise.shape[1] != channels or pointwise.shape[2:] != (1, 1):
        raise ShapeMismatchError(
            f"pointwise kernel must be (O, {channels}, 1, 1), got {tuple(pointwise.shape)}"
        )
    spatial = F.conv2d(input, depthwise, padding=depthwise.shape[2] // 2, groups=channels)
    return F.conv2d(spatial, pointwise)


class SeparableConv2d(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int = 3):
        super().__init__()
        self.depthwise = nn.Conv2d(in_channels, in_channels, kernel_size,
                                   padding=kernel_size // 2, groups=in_channels, bias=False)
        self.pointwise = nn.Conv2d(in_channels, out_channels, 1, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return separable_conv(x, self.depthwise.weight, self.pointwise.weight)


class ConvUnit(nn.Module):
    """Optional ReLU, convolution, batch normalization, optional ReLU."""

    def __init__(self, spec: ConvLayerSpec):
        super().__init__()
        self.relu_before = spec.relu_before
        self.relu_after = spec.relu_after
        if spec.kind is ConvKind.SEPARABLE:
            self.conv = SeparableConv2d(spec.in_channels, spec.out_channels, spec.kernel_size)
        else:
            self.conv = nn.Conv2d(spec.in_channels, spec.out_channels, spec.kernel_size,
                                  stride=spec.stride, padding=spec.kernel_size // 2, bias=False)
        self.bn = nn.BatchNorm2d(spec.out_channels)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.relu_before:
            x = F.relu(x)
        x = self.bn(self.conv(x))
        if self.relu_after:
            x = F.relu(x)
        return x


class XceptionModule(nn.Module):
    """Convolution units with an optional max-pool and a linear residual connection."""

    def __init__(self, spec: ModuleSpec):
        super().__init__()
        self.residual = spec.residual
        self.units = nn.Sequential(*(ConvUnit(conv) for conv in spec.convs))
        self.pool = nn.MaxPool2d(3, stride=2, padding=1) if spec.pooled else None
        if spec.residual is ResidualKind.PROJECTION:
            self.shortcut = nn.Sequential(
                nn.Conv2d(spec.in_channels, spec.out_channels, 1, stride=2 if spec.pooled else 1, bias=False),
                nn.BatchNorm2d(spec.out_channels),
            )
        else:
            self.shortcut = None

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        out = self.units(x)
        if self.pool is not None:
            out = self.pool(out)
        if self.residual is ResidualKind.IDENTITY:
            out = out + x
        elif self.residual is ResidualKind.PROJECTION:
            out = out + self.shortcut(x)
        return out
