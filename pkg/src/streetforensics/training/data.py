from typing import List, Sequence, Tuple

import numpy as np
import torch

from ..errors import EmptyBatchError, ShapeMismatchError
from ..media.frame_source import FrameSource
from ..models import VideoRecord


class FrameSet:
    """Frames of a set of videos addressed as one flat, frame-level sequence.

    Per-video arrays are kept as given (possibly memory-mapped); batches
    gather frames by flat position.
    """

    def __init__(self, videos: Sequence[np.ndarray], labels: Sequence[int], video_ids: Sequence[str]):
        if not (len(videos) == len(labels) == len(video_ids)):
            raise ShapeMismatchError("videos, labels and video_ids must have the same length")
        self.videos: List[np.ndarray] = list(videos)
        self.labels: List[int] = [int(label) for label in labels]
        self.video_ids: List[str] = list(video_ids)
        shapes = {video.shape[1:] for video in self.videos}
        if len(shapes) > 1:
            raise ShapeMismatchError(f"videos have different frame shapes: {sorted(shapes)}")
        self.index: np.ndarray = np.array(
            [(v, f) for v, video in enumerate(self.videos) for f in range(video.shape[0])],
            dtype=np.int64,
        ).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.index)

    def frame_labels(self) -> np.ndarray:
        return np.array([self.labels[v] for v, _ in self.index], dtype=np.int64)

    def batch(self, positions: Sequence[int], dtype: torch.dtype = torch.float32) -> Tuple[torch.Tensor, torch.Tensor]:
        """(N, 3, H, W) frames and (N,) class indices for the given flat positions."""
        if len(positions) == 0:
            raise EmptyBatchError("a batch needs at least one frame")
        pairs = self.index[np.asarray(positions, dtype=np.int64)]
        frames = np.stack([self.videos[v][f] for v, f in pairs]).astype(np.float32, copy=False)
        labels = torch.tensor([self.labels[v] for v, _ in pairs], dtype=torch.int64)
        tensor = torch.from_numpy(np.ascontiguousarray(frames.transpose(0, 3, 1, 2))).to(dtype)
        return tensor, labels


def load_split_frames(records: Sequence[VideoRecord], frame_source: FrameSource) -> FrameSet:
    """Decode the records of one split, in record order."""
    videos = [frame_source.frames(record) for record in records]
    return FrameSet(videos, [record.label.index for record in records], [record.video_id for record in records])
