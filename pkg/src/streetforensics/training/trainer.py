import math
import time
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import torch
from pydantic import BaseModel

from ..errors import EmptyBatchError, NonFiniteGradientError, TrainingDivergedError
from ..infrastructure import PipelineLogger
from ..models import TrainConfig
from ..network import DetectorNetwork, save_checkpoint
from ..network.inference import network_dtype
from .data import FrameSet
from .early_stopping import EarlyStopping
from .log import TrainingLog, TrainingLogEntry
from .loss import compute_loss
from .optimizer import OptimizerState, adam_step

BEST_CHECKPOINT = "best.ckpt"
LAST_CHECKPOINT = "last.ckpt"
DIAGNOSTIC_CHECKPOINT = "diagnostic.ckpt"
TRAINING_LOG = "training_log.jsonl"

# (network, validation frames, epoch) -> (loss, accuracy in percent)
Validator = Callable[[DetectorNetwork, FrameSet, int], Tuple[float, float]]


class StopReason(str, Enum):
    EARLY_STOPPING = "early_stopping"
    MAX_EPOCHS = "max_epochs"


class TrainingResult(BaseModel):
    best_checkpoint: str
    last_checkpoint: str
    best_epoch: int
    best_val_loss: float
    epochs_run: int
    stop_reason: StopReason
    log: List[TrainingLogEntry]


def validation_pass(network: DetectorNetwork, frames: FrameSet, batch_size: int = 32) -> Tuple[float, float]:
    """Mean loss and accuracy over every validation frame, in inference mode."""
    network.eval()
    dtype = network_dtype(network)
    total_loss = 0.0
    correct = 0
    with torch.inference_mode():
        for start in range(0, len(frames), batch_size):
            positions = np.arange(start, min(start + batch_size, len(frames)))
            batch, labels = frames.batch(positions, dtype)
            output = compute_loss(network(batch), labels)
            total_loss += output.loss * len(positions)
            correct += output.correct
    return total_loss / len(frames), 100.0 * correct / len(frames)


def named_parameters(network: DetectorNetwork) -> Dict[str, torch.nn.Parameter]:
    return dict(network.named_parameters())


def train(network: DetectorNetwork,
          train_frames: FrameSet,
          val_frames: FrameSet,
          config: TrainConfig,
          out_dir: str | Path,
          validator: Optional[Validator] = None,
          logger: Optional[PipelineLogger] = None) -> TrainingResult:
    """Adam on mean softmax cross-entropy with validation-loss early stopping.

    Each epoch shuffles training frames with a generator seeded from
    (config.seed, epoch) and runs one adam_step per batch; the last batch
    may be partial. best.ckpt tracks the lowest validation loss, last.ckpt
    the latest epoch.
    """
    if len(train_frames) == 0:
        raise EmptyBatchError("training split has no frames")
    if len(val_frames) == 0:
        raise EmptyBatchError("validation split has no frames")
    logger = logger or PipelineLogger()
    validator = validator or (lambda net, frames, epoch: validation_pass(net, frames, config.batch_size))

    output = Path(out_dir)
    output.mkdir(parents=True, exist_ok=True)
    best_path = output / BEST_CHECKPOINT
    last_path = output / LAST_CHECKPOINT
    log = TrainingLog(output / TRAINING_LOG)
    stopper = EarlyStopping(config.patience)
    dtype = network_dtype(network)
    params = named_parameters(network)
    state = OptimizerState.fresh({name: p.detach() for name, p in params.items()})
    stop_reason = StopReason.MAX_EPOCHS
    epoch = 0

    for epoch in range(1, config.max_epochs + 1):
        started = time.perf_counter()
        network.train()
        order = np.random.default_rng([config.seed, epoch]).permutation(len(train_frames))
        loss_sum = 0.0
        correct = 0

        for step, start in enumerate(range(0, len(order), config.batch_size)):
            positions = order[start:start + config.batch_size]
            batch, labels = train_frames.batch(positions, dtype)
            network.zero_grad(set_to_none=True)
            logits = network(batch)
            loss = compute_loss(logits, labels)
            if not math.isfinite(loss.loss):
                raise TrainingDivergedError(epoch, step, str(diagnostic_checkpoint(network, output, epoch, logger)))
            logits.backward(loss.grad_logits)

            grads = {
                name: p.grad.detach() if p.grad is not None else torch.zeros_like(p)
                for name, p in params.items()
            }
            try:
                updated, state = adam_step({name: p.detach() for name, p in params.items()}, grads, state, config)
            except NonFiniteGradientError:
                diagnostic_checkpoint(network, output, epoch, logger)
                raise
            with torch.no_grad():
                for name, p in params.items():
                    p.copy_(updated[name])

            loss_sum += loss.loss * len(positions)
            correct += loss.correct

        val_loss, val_acc = validator(network, val_frames, epoch)
        if not math.isfinite(val_loss):
            raise TrainingDivergedError(epoch, -1, str(diagnostic_checkpoint(network, output, epoch, logger)))
        improved = stopper.update(epoch, val_loss)
        if improved:
            save_checkpoint(network, best_path, epoch, val_loss)
            logger.log_checkpoint_saved(str(best_path), epoch, "best")
        save_checkpoint(network, last_path, epoch, stopper.best_loss)
        logger.log_checkpoint_saved(str(last_path), epoch, "last")

        entry = TrainingLogEntry(
            epoch=epoch,
            train_loss=loss_sum / len(train_frames),
            train_acc=100.0 * correct / len(train_frames),
            val_loss=val_loss,
            val_acc=val_acc,
            wall_seconds=time.perf_counter() - started,
        )
        log.append(entry)
        logger.log_epoch_complete(epoch, entry.train_loss, entry.train_acc, val_loss, val_acc,
                                  entry.wall_seconds, improved)

        if stopper.should_stop:
            stop_reason = StopReason.EARLY_STOPPING
            logger.log_early_stop_triggered(epoch, stopper.best_epoch, stopper.best_loss)
            break

    return TrainingResult(
        best_checkpoint=str(best_path),
        last_checkpoint=str(last_path),
        best_epoch=stopper.best_epoch,
        best_val_loss=stopper.best_loss,
        epochs_run=epoch,
        stop_reason=stop_reason,
        log=log.entries,
    )


def diagnostic_checkpoint(network: DetectorNetwork, out_dir: Path, epoch: int, logger: PipelineLogger) -> Path:
    path = out_dir / DIAGNOSTIC_CHECKPOINT
    save_checkpoint(network, path, epoch)
    logger.log_checkpoint_saved(str(path), epoch, "diagnostic")
    return path
