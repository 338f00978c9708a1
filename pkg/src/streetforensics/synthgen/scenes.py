import numpy as np

TEXTURE_STD = 24.0
SENSOR_NOISE_STD = 2.0
SPECTRAL_EXPONENT = 1.0


def radial_frequency(height: int, width: int) -> np.ndarray:
    """Radial frequency of each FFT bin, normalized so the per-axis Nyquist frequency is 1."""
    fy = np.fft.fftfreq(height)[:, None] * 2.0
    fx = np.fft.fftfreq(width)[None, :] * 2.0
    return np.sqrt(fy * fy + fx * fx)


def colored_noise(rng: np.random.Generator, height: int, width: int,
                  exponent: float = SPECTRAL_EXPONENT) -> np.ndarray:
    """Periodic 3-channel noise with amplitude spectrum 1/f^exponent, zero mean and unit std."""
    radius = radial_frequency(height, width)
    radius[0, 0] = np.inf
    amplitude = np.maximum(radius, 1.0 / max(height, width)) ** -exponent
    amplitude[0, 0] = 0.0
    white = rng.standard_normal((3, height, width))
    field = np.real(np.fft.ifft2(np.fft.fft2(white, axes=(1, 2)) * amplitude, axes=(1, 2)))
    field -= field.mean(axis=(1, 2), keepdims=True)
    field /= field.std(axis=(1, 2), keepdims=True) + 1e-12
    return field.transpose(1, 2, 0)


def sky_to_road(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Vertical blend between a random sky color (top) and road color (bottom)."""
    sky = rng.uniform(120.0, 220.0, size=3)
    road = rng.uniform(40.0, 120.0, size=3)
    weight = np.linspace(0.0, 1.0, height)[:, None, None]
    column = (1.0 - weight) * sky + weight * road
    return np.broadcast_to(column, (height, width, 3)).copy()


def render_scene(rng: np.random.Generator, frame_count: int, height: int, width: int) -> np.ndarray:
    """A textured driving-scene stand-in panned horizontally over time.

    Returns float64 frames (T, H, W, 3) on the 0..255 scale, unquantized.
    """
    background = sky_to_road(rng, height, width)
    texture = colored_noise(rng, height, width) * TEXTURE_STD
    speed = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
    frames = np.empty((frame_count, height, width, 3), dtype=np.float64)
    for t in range(frame_count):
        frames[t] = background + np.roll(texture, shift=t * speed, axis=1)
        frames[t] += rng.standard_normal((height, width, 3)) * SENSOR_NOISE_STD
    return frames


def quantize(frames: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(frames), 0, 255).astype(np.uint8)
