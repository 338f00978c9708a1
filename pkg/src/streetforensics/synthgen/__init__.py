from .artifacts import apply_artifact, high_frequency_energy, high_frequency_ratio
from .generator import generate_fixture, render_video, video_rng
from .provenance import describe_fixture, record_checksum, verify_provenance
from .scenes import render_scene

__all__ = [
    "apply_artifact",
    "high_frequency_energy",
    "high_frequency_ratio",
    "generate_fixture",
    "render_video",
    "video_rng",
    "describe_fixture",
    "record_checksum",
    "verify_provenance",
    "render_scene",
]
