import hashlib
import re
from pathlib import Path
from typing import Optional, Protocol, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from ..models import VideoRecord
from .frames import NETWORK_INPUT_SIZE, extract_frames, preprocess_frame


class FrameSource(Protocol):
    """Supplies the preprocessed frames of a video as an (N, H, W, 3) float32 array."""

    def frames(self, record: VideoRecord) -> np.ndarray:
        ...


class SourceFingerprint(BaseModel):
    """Identifies the file a cache entry was decoded from."""

    model_config = ConfigDict(frozen=True)

    path: str
    size: Optional[int] = None
    mtime_ns: Optional[int] = None
    frame_count: int

    @classmethod
    def of(cls, record: VideoRecord) -> "SourceFingerprint":
        path = Path(record.path).resolve()
        stat = path.stat() if path.exists() else None
        return cls(
            path=str(path),
            size=stat.st_size if stat else None,
            mtime_ns=stat.st_mtime_ns if stat else None,
            frame_count=record.frame_count,
        )


def _cache_name(video_id: str, size: Tuple[int, int]) -> str:
    # The id digest keeps ids that sanitize alike ("a/b", "a_b") apart.
    safe = re.sub(r"[^A-Za-z0-9_.@-]", "_", video_id)
    digest = hashlib.sha256(video_id.encode("utf-8")).hexdigest()[:12]
    return f"{safe}-{digest}_{size[0]}x{size[1]}.npy"


class FrameCache:
    """Preprocessed frames stored once per video as .npy and memory-mapped on reuse.

    Each entry carries a JSON sidecar fingerprinting its source file; an entry
    whose fingerprint no longer matches the record is decoded again.
    """

    def __init__(self, directory: str | Path, size: Tuple[int, int]):
        self.directory = Path(directory)
        self.size = tuple(size)

    def entry(self, record: VideoRecord) -> Path:
        return self.directory / _cache_name(record.video_id, self.size)

    @staticmethod
    def sidecar(entry: Path) -> Path:
        return entry.with_suffix(".json")

    def load(self, record: VideoRecord) -> Optional[np.ndarray]:
        entry = self.entry(record)
        sidecar = self.sidecar(entry)
        if not entry.exists() or not sidecar.exists():
            return None
        try:
            stored = SourceFingerprint.model_validate_json(sidecar.read_text(encoding="utf-8"))
        except (OSError, ValidationError):
            return None
        if stored != SourceFingerprint.of(record):
            return None
        cached = np.load(entry, mmap_mode="r")
        return cached if cached.shape[0] == record.frame_count else None

    def store(self, record: VideoRecord, array: np.ndarray) -> np.ndarray:
        entry = self.entry(record)
        self.directory.mkdir(parents=True, exist_ok=True)
        temporary = entry.with_suffix(".tmp.npy")
        np.save(temporary, array)
        temporary.replace(entry)
        self.sidecar(entry).write_text(SourceFingerprint.of(record).model_dump_json(), encoding="utf-8")
        return np.load(entry, mmap_mode="r")


class VideoFrameSource:
    """Decode and preprocess videos, optionally through a FrameCache."""

    def __init__(self,
                 size: Tuple[int, int] = NETWORK_INPUT_SIZE,
                 cache_dir: Optional[str | Path] = None):
        self.size = tuple(size)
        self.cache = FrameCache(cache_dir, self.size) if cache_dir else None

    def decode(self, record: VideoRecord) -> np.ndarray:
        tensors = [
            preprocess_frame(frame, record.video_id, index, self.size).values
            for index, frame in enumerate(extract_frames(record))
        ]
        return np.stack(tensors)

    def frames(self, record: VideoRecord) -> np.ndarray:
        if self.cache is None:
            return self.decode(record)
        cached = self.cache.load(record)
        if cached is not None:
            return cached
        return self.cache.store(record, self.decode(record))
