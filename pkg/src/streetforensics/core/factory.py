from typing import Optional

from ..infrastructure import PipelineLogger, configure_logging
from ..media import FFprobeProber
from ..repositories import JsonLinesRepository
from .pipeline import DetectionPipeline


class PipelineFactory:
    """Factory for configured DetectionPipeline instances."""

    @staticmethod
    def create_pipeline(log_level: str = "INFO",
                        log_file: Optional[str] = None,
                        json_logs: bool = True,
                        ffmpeg_bin: str = "ffmpeg",
                        ffprobe_bin: str = "ffprobe") -> DetectionPipeline:
        logger = configure_logging(log_level=log_level, log_file=log_file, json_logs=json_logs)
        return DetectionPipeline(
            repository=JsonLinesRepository(),
            logger=PipelineLogger(logger),
            prober=FFprobeProber(ffprobe_bin),
            ffmpeg_bin=ffmpeg_bin,
        )

    @staticmethod
    def create_quiet_pipeline() -> DetectionPipeline:
        """Warnings and errors only; used by tests and library callers."""
        return PipelineFactory.create_pipeline(log_level="WARNING")
