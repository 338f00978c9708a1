from dataclasses import dataclass
from typing import Iterator, Tuple

import cv2
import numpy as np
import torch
import torch.nn.functional as F

from ..errors import FrameDecodeError
from ..models import VideoRecord

NETWORK_INPUT_SIZE = (256, 512)

# 8-bit values map linearly onto [-1, 1].
NORMALIZED_RANGE = (-1.0, 1.0)
PIXEL_SCALE = 127.5


@dataclass(frozen=True)
class FrameTensor:
    """A preprocessed frame: float32 H x W x 3 values in NORMALIZED_RANGE."""

    values: np.ndarray
    video_id: str = ""
    frame_index: int = 0

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    def to_chw(self) -> torch.Tensor:
        return torch.from_numpy(np.ascontiguousarray(self.values.transpose(2, 0, 1)))


def extract_frames(record: VideoRecord) -> Iterator[np.ndarray]:
    """Yield exactly `record.frame_count` 8-bit RGB frames in presentation order."""
    capture = cv2.VideoCapture(str(record.path))
    try:
        if not capture.isOpened():
            raise FrameDecodeError(record.path, 0, "could not open video")
        for frame_index in range(record.frame_count):
            ok, frame = capture.read()
            if not ok or frame is None:
                raise FrameDecodeError(record.path, frame_index, "stream ended early")
            if frame.shape != (record.height, record.width, 3):
                raise FrameDecodeError(record.path, frame_index,
                                       f"decoded shape {frame.shape}, recorded "
                                       f"{(record.height, record.width, 3)}")
            yield cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)

        ok, _ = capture.read()
        if ok:
            raise FrameDecodeError(record.path, record.frame_count,
                                   f"stream holds more than the recorded {record.frame_count} frames")
    finally:
        capture.release()


def preprocess_frame(frame: np.ndarray,
                     video_id: str = "",
                     frame_index: int = 0,
                     size: Tuple[int, int] = NETWORK_INPUT_SIZE) -> FrameTensor:
    """Bilinear resize to `size` (half-pixel centers, no antialiasing), then map to [-1, 1]."""
    array = np.asarray(frame)
    if array.ndim != 3 or array.shape[2] != 3:
        raise ValueError(f"expected an H x W x 3 frame, got shape {array.shape}")
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise ValueError("frame must have at least one pixel")

    pixels = torch.from_numpy(np.ascontiguousarray(array, dtype=np.float64)).permute(2, 0, 1).unsqueeze(0)
    if tuple(pixels.shape[-2:]) != tuple(size):
        pixels = F.interpolate(pixels, size=size, mode="bilinear", align_corners=False, antialias=False)
    normalized = pixels[0].permute(1, 2, 0) / PIXEL_SCALE - 1.0
    values = np.clip(normalized.numpy(), *NORMALIZED_RANGE).astype(np.float32)
    return FrameTensor(values=values, video_id=video_id, frame_index=frame_index)
