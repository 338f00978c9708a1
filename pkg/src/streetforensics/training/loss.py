from dataclasses import dataclass
from typing import Sequence

import torch

from ..errors import EmptyBatchError, ShapeMismatchError
from ..models import Label


@dataclass(frozen=True)
class LossOutput:
    loss: float
    grad_logits: torch.Tensor
    correct: int


def label_tensor(labels: Sequence[Label | int] | torch.Tensor) -> torch.Tensor:
    if isinstance(labels, torch.Tensor):
        indices = labels.to(torch.int64)
    else:
        indices = torch.tensor(
            [label.index if isinstance(label, Label) else int(label) for label in labels],
            dtype=torch.int64,
        )
    if indices.numel() and ((indices < 0) | (indices > 1)).any():
        raise ValueError("labels must be 0 (real) or 1 (fake)")
    return indices


def compute_loss(logits: torch.Tensor, labels: Sequence[Label | int] | torch.Tensor) -> LossOutput:
    """Mean softmax cross-entropy and its gradient (softmax - one_hot) / N w.r.t. the logits."""
    if logits.dim() != 2 or logits.shape[1] != 2:
        raise ShapeMismatchError(f"expected N x 2 logits, got {tuple(logits.shape)}")
    if logits.shape[0] == 0:
        raise EmptyBatchError("cannot compute the loss of an empty batch")
    targets = label_tensor(labels)
    if targets.shape != (logits.shape[0],):
        raise ShapeMismatchError(f"{logits.shape[0]} logit rows but {tuple(targets.shape)} labels")

    logits = logits.detach()
    batch_size = logits.shape[0]
    log_probabilities = torch.log_softmax(logits, dim=1)
    rows = torch.arange(batch_size)
    loss = -log_probabilities[rows, targets].mean()

    grad = torch.softmax(logits, dim=1)
    grad[rows, targets] -= 1.0
    grad /= batch_size

    predicted = (log_probabilities[:, 1] >= log_probabilities[:, 0]).to(torch.int64)
    return LossOutput(loss=float(loss), grad_logits=grad, correct=int((predicted == targets).sum()))
