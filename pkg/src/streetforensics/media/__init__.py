from .probe import FFprobeProber, ProbeResult, VideoProber
from .codec import (
    EncoderTimeout,
    compress_manifest,
    compress_video,
    compressed_video_id,
    write_lossless_video,
)
from .frames import (
    NETWORK_INPUT_SIZE,
    NORMALIZED_RANGE,
    FrameTensor,
    extract_frames,
    preprocess_frame,
)
from .frame_source import FrameSource, VideoFrameSource

__all__ = [
    "FFprobeProber",
    "ProbeResult",
    "VideoProber",
    "EncoderTimeout",
    "compress_manifest",
    "compress_video",
    "compressed_video_id",
    "write_lossless_video",
    "NETWORK_INPUT_SIZE",
    "NORMALIZED_RANGE",
    "FrameTensor",
    "extract_frames",
    "preprocess_frame",
    "FrameSource",
    "VideoFrameSource",
]
