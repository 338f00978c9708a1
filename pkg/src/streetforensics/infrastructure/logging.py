import logging
import sys
import uuid
from pathlib import Path
from typing import Dict, Optional

import structlog


# Shared by every renderer; the renderer is appended per configuration.
BASE_PROCESSORS = (
    structlog.contextvars.merge_contextvars,
    structlog.processors.add_log_level,
    structlog.processors.TimeStamper(fmt="iso", utc=True),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.format_exc_info,
)


def _handlers(level: int, log_file: Optional[str]) -> list:
    """stderr always, plus an optional file; stdout belongs to the reports."""
    handlers: list = [logging.StreamHandler(sys.stderr)]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path, encoding="utf-8"))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter("%(message)s"))
    return handlers


def configure_logging(log_level: str = "INFO",
                      log_file: Optional[str] = None,
                      json_logs: bool = True) -> structlog.stdlib.BoundLogger:
    """Route structlog through stdlib logging with JSON or console rendering.

    Safe to call once per CLI invocation: earlier handlers are replaced, so
    repeated runs in one process never duplicate records or leak file handles.
    """
    level = getattr(logging, log_level.upper())
    logging.basicConfig(level=level, handlers=_handlers(level, log_file), force=True)

    renderer = structlog.processors.JSONRenderer(sort_keys=True) if json_logs else structlog.dev.ConsoleRenderer()
    structlog.configure(
        processors=[*BASE_PROCESSORS, renderer],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=False,
    )
    return structlog.get_logger("streetforensics")


class PipelineLogger:
    """Domain event logger shared by the ingest, media, training and evaluation stages."""

    def __init__(self, logger: Optional[structlog.stdlib.BoundLogger] = None):
        self.logger = logger or structlog.get_logger()

    def log_run_started(self, subcommand: str, output_dir: str, seed: Optional[int]) -> None:
        self.logger.info("run_started", subcommand=subcommand, output_dir=output_dir, seed=seed)

    def log_run_complete(self, subcommand: str, processing_time_seconds: float) -> None:
        self.logger.info(
            "run_complete",
            subcommand=subcommand,
            processing_time_seconds=round(processing_time_seconds, 3)
        )

    def log_condition_trained(self, condition: str, checkpoint_id: str, best_epoch: int, stop_reason: str) -> None:
        self.logger.info(
            "condition_trained",
            condition=condition,
            checkpoint_id=checkpoint_id,
            best_epoch=best_epoch,
            stop_reason=stop_reason
        )

    def log_video_discovered(self, video_id: str, path: str, frame_count: int) -> None:
        self.logger.debug("video_discovered", video_id=video_id, path=path, frame_count=frame_count)

    def log_video_unreadable(self, path: str, error: str, permissive: bool) -> None:
        self.logger.warning("video_unreadable", path=path, error=error, permissive=permissive)

    def log_manifest_built(self, root: str, record_count: int, excluded_count: int) -> None:
        self.logger.info(
            "manifest_built",
            root=root,
            record_count=record_count,
            excluded_count=excluded_count
        )

    def log_encode_started(self, video_id: str, quality: str, rate_value: int) -> None:
        self.logger.debug("encode_started", video_id=video_id, quality=quality, crf=rate_value)

    def log_encode_complete(self,
                            video_id: str,
                            quality: str,
                            size_bytes: int,
                            processing_time_seconds: float) -> None:
        self.logger.info(
            "encode_complete",
            video_id=video_id,
            quality=quality,
            size_bytes=size_bytes,
            processing_time_seconds=round(processing_time_seconds, 3)
        )

    def log_fixture_video_written(self, video_id: str, label: str, path: str) -> None:
        self.logger.debug("fixture_video_written", video_id=video_id, label=label, path=path)

    def log_split_complete(self, seed: int, counts: Dict[str, int]) -> None:
        self.logger.info("split_complete", seed=seed, **counts)

    def log_epoch_complete(self,
                           epoch: int,
                           train_loss: float,
                           train_acc: float,
                           val_loss: float,
                           val_acc: float,
                           wall_seconds: float,
                           improved: bool) -> None:
        self.logger.info(
            "epoch_complete",
            epoch=epoch,
            train_loss=round(train_loss, 6),
            train_acc=round(train_acc, 2),
            val_loss=round(val_loss, 6),
            val_acc=round(val_acc, 2),
            wall_seconds=round(wall_seconds, 2),
            improved=improved
        )

    def log_early_stop_triggered(self, epoch: int, best_epoch: int, best_val_loss: float) -> None:
        self.logger.info(
            "early_stop_triggered",
            epoch=epoch,
            best_epoch=best_epoch,
            best_val_loss=best_val_loss
        )

    def log_checkpoint_saved(self, path: str, epoch: int, kind: str) -> None:
        self.logger.debug("checkpoint_saved", path=path, epoch=epoch, kind=kind)

    def log_evaluation_complete(self,
                                split_id: str,
                                checkpoint_id: str,
                                frames: int,
                                frame_accuracy: Optional[float]) -> None:
        self.logger.info(
            "evaluation_complete",
            split_id=split_id,
            checkpoint_id=checkpoint_id,
            frames=frames,
            frame_accuracy=None if frame_accuracy is None else round(frame_accuracy, 2)
        )

    def log_matrix_cell_complete(self, row: str, column: str, accuracy: float) -> None:
        self.logger.info("matrix_cell_complete", row=row, column=column, accuracy=round(accuracy, 2))

    def log_unexpected_failure(self, subcommand: str, error: BaseException) -> None:
        self.logger.error(
            "unexpected_failure",
            subcommand=subcommand,
            error_type=type(error).__name__,
            error_message=str(error),
            exc_info=error,
        )


def create_run_id() -> str:
    """Create a short run id for tracing."""
    return uuid.uuid4().hex[:8]


def bind_context(**kwargs) -> None:
    """Bind context variables to every subsequent log record."""
    structlog.contextvars.bind_contextvars(**kwargs)
