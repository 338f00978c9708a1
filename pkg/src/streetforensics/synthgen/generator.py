import asyncio
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..infrastructure import PipelineLogger
from ..media.codec import write_lossless_video
from ..models import DatasetManifest, FixtureConfig, Label, Quality, SubDataset, VideoRecord
from .artifacts import apply_artifact, high_frequency_ratio
from .provenance import build_provenance
from .scenes import quantize, render_scene

FIXTURE_EXTENSION = ".mkv"


def video_rng(seed: int, index: int) -> np.random.Generator:
    """Scene stream for pair `index`; real and fake of a pair draw from the same stream."""
    return np.random.default_rng([seed, index])


def render_video(config: FixtureConfig, index: int, label: Label, strength: Optional[float] = None) -> np.ndarray:
    """Quantized frames (T, H, W, 3) of one fixture video.

    `strength` overrides the configured artifact strength for fakes.
    """
    scene = render_scene(video_rng(config.seed, index), config.frames_per_video, config.height, config.width)
    if label is Label.FAKE:
        amount = config.artifact_strength if strength is None else strength
        scene = np.stack([apply_artifact(frame, config.artifact_type, amount) for frame in scene])
    return quantize(scene)


def fixture_relative_path(sub_dataset: SubDataset, label: Label, index: int) -> str:
    return f"{sub_dataset.value}/{Quality.RAW.value}/{label.value}/fixture_{index:04d}{FIXTURE_EXTENSION}"


def fixture_record(config: FixtureConfig, out_dir: Path, sub_dataset: SubDataset, label: Label, index: int) -> VideoRecord:
    relative = fixture_relative_path(sub_dataset, label, index)
    return VideoRecord(
        video_id=relative.rsplit(".", 1)[0],
        path=str(out_dir / relative),
        sub_dataset=sub_dataset,
        label=label,
        quality=Quality.RAW,
        frame_count=config.frames_per_video,
        width=config.width,
        height=config.height,
        fps=config.fps,
        source_id=f"{sub_dataset.value}/{label.value}/fixture_{index:04d}",
        generator=f"synthgen:{config.artifact_type.value}" if label is Label.FAKE else None,
    )


def write_fixture_video(config: FixtureConfig,
                        record: VideoRecord,
                        index: int,
                        ffmpeg_bin: str = "ffmpeg") -> np.ndarray:
    """Render and write one video; returns its first frame for corpus statistics."""
    frames = render_video(config, index, record.label)
    write_lossless_video(frames, record.path, config.fps, ffmpeg_bin)
    return frames[0]


async def generate_fixture(config: FixtureConfig,
                           out_dir: str | Path,
                           sub_dataset: SubDataset = SubDataset.SYNTHETIC,
                           max_concurrency: int = 4,
                           ffmpeg_bin: str = "ffmpeg",
                           logger: Optional[PipelineLogger] = None) -> DatasetManifest:
    """Generate a balanced RAW fixture corpus under `out_dir`.

    Videos are FFV1 so every frame round-trips bit-exactly; the returned
    manifest is ordered by path and carries a provenance block.
    """
    out_root = Path(out_dir)
    semaphore = asyncio.Semaphore(max_concurrency)
    jobs: List[Tuple[VideoRecord, int]] = [
        (fixture_record(config, out_root, sub_dataset, label, index), index)
        for label in sorted(Label, key=lambda label: label.value)
        for index in range(config.num_videos_per_class)
    ]

    async def write_one(record: VideoRecord, index: int) -> np.ndarray:
        async with semaphore:
            first_frame = await asyncio.to_thread(write_fixture_video, config, record, index, ffmpeg_bin)
        if logger:
            logger.log_fixture_video_written(record.video_id, record.label.value, record.path)
        return first_frame

    first_frames = await asyncio.gather(*(write_one(record, index) for record, index in jobs))

    real = [frame for (record, _), frame in zip(jobs, first_frames) if record.label is Label.REAL]
    fake = [frame for (record, _), frame in zip(jobs, first_frames) if record.label is Label.FAKE]
    statistics = {
        "high_frequency_energy_ratio": high_frequency_ratio(fake, real),
        "mean_pixel_real": float(np.mean(real)),
        "mean_pixel_fake": float(np.mean(fake)),
    }

    records = [record for record, _ in jobs]
    manifest = DatasetManifest(
        records=records,
        source_description=f"synthetic fixture ({config.artifact_type.value}, seed={config.seed})",
    )
    return manifest.model_copy(update={"provenance": build_provenance(manifest, config, statistics)})
