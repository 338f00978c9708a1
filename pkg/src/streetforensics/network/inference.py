from typing import List, Sequence

import numpy as np
import torch

from ..errors import ShapeMismatchError
from ..media.frames import FrameTensor
from ..models import DEFAULT_THRESHOLD, FramePrediction
from .xception import DetectorNetwork


def network_dtype(network: DetectorNetwork) -> torch.dtype:
    return next(network.parameters()).dtype


def to_batch(frames: np.ndarray | Sequence[FrameTensor], dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """Stack (N, H, W, 3) frames into an (N, 3, H, W) tensor."""
    if isinstance(frames, np.ndarray):
        array = frames
    else:
        array = np.stack([frame.values for frame in frames]) if len(frames) else np.empty((0, 0, 0, 3))
    if array.ndim != 4 or array.shape[-1] != 3:
        raise ShapeMismatchError(f"expected (N, H, W, 3) frames, got shape {array.shape}")
    tensor = torch.from_numpy(np.ascontiguousarray(array.transpose(0, 3, 1, 2)))
    return tensor.to(dtype)


def forward(network: DetectorNetwork, batch: torch.Tensor | np.ndarray | Sequence[FrameTensor]) -> torch.Tensor:
    """Logits (N x 2) for a batch; runs in the network's current train/eval mode."""
    if not isinstance(batch, torch.Tensor):
        batch = to_batch(batch, network_dtype(network))
    return network(batch)


def fake_scores(logits: torch.Tensor) -> np.ndarray:
    """Softmax probability of the fake class per row, in double precision."""
    return torch.softmax(logits.detach().to(torch.float64), dim=1)[:, 1].numpy()


def prediction_from_logits(logits: torch.Tensor,
                           video_id: str = "",
                           frame_index: int = 0,
                           threshold: float = DEFAULT_THRESHOLD) -> FramePrediction:
    row = logits.reshape(1, -1)
    if row.shape[1] != 2:
        raise ShapeMismatchError(f"expected two logits, got {row.shape[1]}")
    score = float(fake_scores(row)[0])
    return FramePrediction.from_score(video_id, frame_index, score, threshold)


def predict_frames(network: DetectorNetwork,
                   frames: np.ndarray,
                   video_id: str = "",
                   threshold: float = DEFAULT_THRESHOLD,
                   batch_size: int = 32) -> List[FramePrediction]:
    """Score every frame of one video in inference mode; order follows frame index."""
    network.eval()
    dtype = network_dtype(network)
    predictions: List[FramePrediction] = []
    with torch.inference_mode():
        for start in range(0, len(frames), batch_size):
            chunk = to_batch(np.asarray(frames[start:start + batch_size]), dtype)
            scores = fake_scores(network(chunk))
            predictions.extend(
                FramePrediction.from_score(video_id, start + offset, float(score), threshold)
                for offset, score in enumerate(scores)
            )
    return predictions


def predict_frame(network: DetectorNetwork,
                  frame: FrameTensor,
                  threshold: float = DEFAULT_THRESHOLD) -> FramePrediction:
    network.eval()
    with torch.inference_mode():
        logits = forward(network, [frame])
    return prediction_from_logits(logits[0], frame.video_id, frame.frame_index, threshold)
