import json
import subprocess
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Protocol

from pydantic import BaseModel, ConfigDict

from ..errors import MediaProbeError


class ProbeResult(BaseModel):
    """Container facts used to populate and verify VideoRecords."""

    model_config = ConfigDict(frozen=True)

    codec: str
    width: int
    height: int
    fps: float
    frame_count: int
    pixel_format: str = ""
    has_audio: bool = False
    size_bytes: int = 0


class VideoProber(Protocol):
    """Anything that can inspect a video container."""

    def probe(self, path: str | Path) -> ProbeResult:
        ...


def _parse_rate(rate: Optional[str]) -> Optional[float]:
    if not rate or rate in ("0/0", "0"):
        return None
    try:
        value = float(Fraction(rate))
    except (ValueError, ZeroDivisionError):
        return None
    return value if value > 0 else None


class FFprobeProber:
    """Probe containers with ffprobe, counting decoded frames rather than trusting headers."""

    def __init__(self, ffprobe_bin: str = "ffprobe", timeout_seconds: float = 120.0):
        self.ffprobe_bin = ffprobe_bin
        self.timeout_seconds = timeout_seconds

    def run(self, path: Path) -> Dict[str, Any]:
        cmd = [
            self.ffprobe_bin,
            "-v", "error",
            "-count_frames",
            "-print_format", "json",
            "-show_format",
            "-show_streams",
            str(path),
        ]
        try:
            proc = subprocess.run(
                cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, timeout=self.timeout_seconds
            )
        except (OSError, subprocess.TimeoutExpired) as e:
            raise MediaProbeError(f"ffprobe could not inspect {path}: {e}") from e
        if proc.returncode != 0:
            raise MediaProbeError(f"ffprobe failed on {path}: {proc.stderr.strip() or 'unknown error'}")
        return json.loads(proc.stdout)

    def probe(self, path: str | Path) -> ProbeResult:
        video_path = Path(path)
        if not video_path.exists():
            raise MediaProbeError(f"video not found: {video_path}")
        info = self.run(video_path)
        streams = info.get("streams", [])
        video = next((s for s in streams if s.get("codec_type") == "video"), None)
        if video is None:
            raise MediaProbeError(f"no video stream in {video_path}")

        frame_count = video.get("nb_read_frames") or video.get("nb_frames")
        fps = _parse_rate(video.get("avg_frame_rate")) or _parse_rate(video.get("r_frame_rate"))
        if frame_count is None or int(frame_count) < 1:
            raise MediaProbeError(f"no decodable frames in {video_path}")
        if fps is None:
            raise MediaProbeError(f"unknown frame rate in {video_path}")

        return ProbeResult(
            codec=video.get("codec_name", ""),
            width=int(video["width"]),
            height=int(video["height"]),
            fps=fps,
            frame_count=int(frame_count),
            pixel_format=video.get("pix_fmt", ""),
            has_audio=any(s.get("codec_type") == "audio" for s in streams),
            size_bytes=video_path.stat().st_size,
        )
