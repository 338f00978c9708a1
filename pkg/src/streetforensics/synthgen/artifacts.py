import numpy as np
import torch
import torch.nn.functional as F

from ..models import ArtifactType
from .scenes import radial_frequency

NOTCH_BAND = (0.5, 0.9)
SMOOTHING_SIGMA = 1.5
HIGH_FREQUENCY_CUTOFF = 0.75


def checkerboard(frame: np.ndarray) -> np.ndarray:
    """Average-pool by 2, then upsample with a stride-2 transposed 3x3 convolution.

    The kernel overlaps unevenly (1, 2 or 4 taps per output pixel), leaving
    the periodic residual typical of strided generator upsampling. The
    kernel is scaled so mean brightness is preserved.
    """
    pixels = torch.from_numpy(np.ascontiguousarray(frame.transpose(2, 0, 1)))[None]
    pooled = F.avg_pool2d(pixels, 2)
    kernel = torch.full((3, 1, 3, 3), 4.0 / 9.0, dtype=pixels.dtype)
    upsampled = F.conv_transpose2d(pooled, kernel, stride=2, padding=1, output_padding=1, groups=3)
    return upsampled[0].numpy().transpose(1, 2, 0)


def _filter_channels(frame: np.ndarray, transfer: np.ndarray) -> np.ndarray:
    spectrum = np.fft.fft2(frame, axes=(0, 1))
    return np.real(np.fft.ifft2(spectrum * transfer[:, :, None], axes=(0, 1)))


def spectral_notch(frame: np.ndarray, strength: float) -> np.ndarray:
    radius = radial_frequency(*frame.shape[:2])
    transfer = np.where((radius >= NOTCH_BAND[0]) & (radius < NOTCH_BAND[1]), 1.0 - strength, 1.0)
    return _filter_channels(frame, transfer)


def gaussian_blur(frame: np.ndarray, sigma: float = SMOOTHING_SIGMA) -> np.ndarray:
    fy = np.fft.fftfreq(frame.shape[0])[:, None]
    fx = np.fft.fftfreq(frame.shape[1])[None, :]
    transfer = np.exp(-2.0 * np.pi ** 2 * sigma ** 2 * (fy * fy + fx * fx))
    return _filter_channels(frame, transfer)


def apply_artifact(frame: np.ndarray, artifact_type: ArtifactType | str, strength: float) -> np.ndarray:
    """Inject one generator trace into an H x W x 3 frame on the 0..255 scale.

    Returns float64; strength 0 returns the frame unchanged.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"artifact strength must be in [0, 1], got {strength}")
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError(f"expected an H x W x 3 frame, got shape {frame.shape}")
    if frame.shape[0] % 2 or frame.shape[1] % 2:
        raise ValueError(f"frame dimensions must be even, got {frame.shape[:2]}")
    values = np.asarray(frame, dtype=np.float64)
    if strength == 0.0:
        return values.copy()

    artifact_type = ArtifactType(artifact_type)
    if artifact_type is ArtifactType.CHECKERBOARD:
        return (1.0 - strength) * values + strength * checkerboard(values)
    if artifact_type is ArtifactType.SPECTRAL_NOTCH:
        return spectral_notch(values, strength)
    return (1.0 - strength) * values + strength * gaussian_blur(values)


def high_frequency_energy(frame: np.ndarray, cutoff: float = HIGH_FREQUENCY_CUTOFF) -> float:
    """Mean spectral power of the grayscale frame at radial frequencies >= cutoff (axis Nyquist = 1)."""
    gray = np.asarray(frame, dtype=np.float64).mean(axis=2)
    power = np.abs(np.fft.fft2(gray - gray.mean())) ** 2
    radius = radial_frequency(*gray.shape)
    return float(power[radius >= cutoff].mean())


def high_frequency_ratio(fake_frames, real_frames) -> float:
    fake = np.mean([high_frequency_energy(frame) for frame in fake_frames])
    real = np.mean([high_frequency_energy(frame) for frame in real_frames])
    return float(fake / real) if real > 0 else float("inf")
