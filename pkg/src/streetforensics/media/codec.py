import asyncio
import subprocess
import time
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..errors import EncoderError
from ..infrastructure import PipelineLogger
from ..models import DatasetManifest, EncodingParams, Quality, QualityLevel, VideoRecord
from .probe import FFprobeProber, VideoProber

BITEXACT_FLAGS = ["-fflags", "+bitexact", "-flags:v", "+bitexact", "-map_metadata", "-1"]


class EncoderTimeout(Exception):
    """Encoder did not finish in time; retried before surfacing as EncoderError."""

    def __init__(self, diagnostics: str):
        self.diagnostics = diagnostics
        super().__init__("encoder timed out")


def frame_rate_argument(fps: float) -> str:
    rate = Fraction(fps).limit_denominator(1001)
    return f"{rate.numerator}/{rate.denominator}"


def compressed_video_id(source: VideoRecord, quality: Quality) -> str:
    return f"{source.group_id}@{quality.value}"


def write_lossless_video(frames: Iterable[np.ndarray],
                         path: str | Path,
                         fps: float,
                         ffmpeg_bin: str = "ffmpeg") -> Path:
    """Write 8-bit RGB frames as FFV1 in Matroska; RGB survives bit-exactly."""
    frame_list = [np.ascontiguousarray(frame, dtype=np.uint8) for frame in frames]
    if not frame_list:
        raise ValueError("cannot write a video with no frames")
    height, width = frame_list[0].shape[:2]
    for index, frame in enumerate(frame_list):
        if frame.shape != (height, width, 3):
            raise ValueError(f"frame {index} has shape {frame.shape}, expected {(height, width, 3)}")

    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    cmd = [
        ffmpeg_bin, "-v", "error", "-y",
        "-f", "rawvideo", "-pix_fmt", "rgb24",
        "-s", f"{width}x{height}", "-r", frame_rate_argument(fps),
        "-i", "pipe:0",
        "-an", "-c:v", "ffv1", "-pix_fmt", "bgr0", "-threads", "1",
        *BITEXACT_FLAGS,
        str(output),
    ]
    try:
        proc = subprocess.run(cmd, input=b"".join(f.tobytes() for f in frame_list),
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    except OSError as e:
        raise EncoderError(f"could not start encoder '{ffmpeg_bin}': {e}") from e
    if proc.returncode != 0:
        raise EncoderError(f"lossless write failed for {output}", proc.stderr.decode(errors="replace"))
    return output


@retry(
    retry=retry_if_exception_type(EncoderTimeout),
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=1, min=1, max=8),
    reraise=True,
)
def _run_encoder(cmd: List[str], timeout_seconds: float) -> subprocess.CompletedProcess:
    try:
        return subprocess.run(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, timeout=timeout_seconds)
    except subprocess.TimeoutExpired as e:
        raise EncoderTimeout((e.stderr or b"").decode(errors="replace")) from e


def compress_video(source: VideoRecord,
                   level: QualityLevel,
                   output: str | Path,
                   ffmpeg_bin: str = "ffmpeg",
                   prober: Optional[VideoProber] = None,
                   timeout_seconds: float = 600.0,
                   logger: Optional[PipelineLogger] = None) -> VideoRecord:
    """Encode `source` as H.264 in constant-rate-factor mode at `level`.

    Resolution, frame rate and frame count are preserved; audio is dropped.
    """
    if level.name is Quality.RAW:
        raise ValueError("RAW is not an encoding target")
    prober = prober or FFprobeProber()
    logger = logger or PipelineLogger()

    output_path = Path(output)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    encoding = EncodingParams(rate_value=level.rate_parameter)
    cmd = [
        ffmpeg_bin, "-v", "error", "-y",
        "-i", str(source.path),
        "-map", "0:v:0", "-an",
        "-c:v", encoding.encoder, "-preset", "medium",
        "-crf", str(level.rate_parameter),
        "-pix_fmt", encoding.pixel_format,
        "-threads", "1",
        *BITEXACT_FLAGS,
        str(output_path),
    ]

    logger.log_encode_started(source.video_id, level.name.value, level.rate_parameter)
    start_time = time.perf_counter()
    try:
        proc = _run_encoder(cmd, timeout_seconds)
    except EncoderTimeout as e:
        raise EncoderError(f"encoder timed out on {source.path}", e.diagnostics) from e
    except OSError as e:
        raise EncoderError(f"could not start encoder '{ffmpeg_bin}': {e}") from e
    if proc.returncode != 0:
        raise EncoderError(f"encoding {source.path} at {level.name.value} failed",
                           proc.stderr.decode(errors="replace"))

    probed = prober.probe(output_path)
    if probed.frame_count != source.frame_count:
        raise EncoderError(
            f"frame count changed while encoding {source.path}: "
            f"{source.frame_count} -> {probed.frame_count}"
        )
    if (probed.width, probed.height) != (source.width, source.height):
        raise EncoderError(
            f"resolution changed while encoding {source.path}: "
            f"{source.width}x{source.height} -> {probed.width}x{probed.height}"
        )

    logger.log_encode_complete(source.video_id, level.name.value, probed.size_bytes,
                               time.perf_counter() - start_time)
    return source.model_copy(update={
        "video_id": compressed_video_id(source, level.name),
        "path": str(output_path),
        "quality": level.name,
        "source_id": source.group_id,
        "fps": probed.fps,
        "encoding": encoding,
    })


async def compress_manifest(manifest: DatasetManifest,
                            level: QualityLevel,
                            out_dir: str | Path,
                            max_concurrency: int = 4,
                            ffmpeg_bin: str = "ffmpeg",
                            prober: Optional[VideoProber] = None,
                            logger: Optional[PipelineLogger] = None) -> DatasetManifest:
    """Compress every RAW record of `manifest`; output order follows input order."""
    out_root = Path(out_dir)
    semaphore = asyncio.Semaphore(max_concurrency)

    async def compress_one(record: VideoRecord) -> VideoRecord:
        async with semaphore:
            output = out_root / level.name.value.lower() / f"{record.group_id}.mp4"
            return await asyncio.to_thread(
                compress_video, record, level, output, ffmpeg_bin, prober, 600.0, logger
            )

    sources = [record for record in manifest.records if record.quality is Quality.RAW]
    records = await asyncio.gather(*(compress_one(record) for record in sources))
    return DatasetManifest(
        records=list(records),
        source_description=f"{manifest.source_description} [H.264 crf={level.rate_parameter}]".strip(),
    )
