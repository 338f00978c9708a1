from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from ..errors import SplitError
from ..infrastructure import PipelineLogger
from ..media.frame_source import FrameSource, VideoFrameSource
from ..models import (
    DEFAULT_THRESHOLD,
    AggregationPolicy,
    BreakdownRow,
    ConfusionCounts,
    DatasetManifest,
    EvalReport,
    FramePrediction,
    Quality,
    Split,
    SplitAssignment,
    SubDataset,
    VideoRecord,
    VideoResult,
)
from ..network import DetectorNetwork, predict_frames
from .aggregation import aggregate_video


class FramePredictor(Protocol):
    """Maps one video's preprocessed frames to per-frame predictions."""

    def predict(self, video_id: str, frames: np.ndarray) -> List[FramePrediction]:
        ...


class NetworkPredictor:
    def __init__(self, network: DetectorNetwork, threshold: float = DEFAULT_THRESHOLD, batch_size: int = 32):
        self.network = network
        self.threshold = threshold
        self.batch_size = batch_size

    def predict(self, video_id: str, frames: np.ndarray) -> List[FramePrediction]:
        return predict_frames(self.network, frames, video_id, self.threshold, self.batch_size)


def as_predictor(model: DetectorNetwork | FramePredictor, threshold: float = DEFAULT_THRESHOLD) -> FramePredictor:
    return NetworkPredictor(model, threshold) if isinstance(model, DetectorNetwork) else model


def score_video(predictor: FramePredictor,
                record: VideoRecord,
                frame_source: FrameSource) -> Tuple[ConfusionCounts, VideoResult]:
    predictions = predictor.predict(record.video_id, frame_source.frames(record))
    counts = ConfusionCounts()
    for prediction in predictions:
        counts = counts + ConfusionCounts.of(record.label, prediction.predicted_label)
    result = VideoResult(
        video_id=record.video_id,
        label=record.label,
        sub_dataset=record.sub_dataset,
        quality=record.quality,
        frames=len(predictions),
        correct_frames=counts.correct,
        mean_score_fake=float(np.mean([p.score_fake for p in predictions])),
        video_labels={policy: aggregate_video(predictions, policy) for policy in AggregationPolicy},
    )
    return counts, result


def evaluate_records(model: DetectorNetwork | FramePredictor,
                     records: Sequence[VideoRecord],
                     frame_source: Optional[FrameSource] = None,
                     checkpoint_id: str = "unknown",
                     split_id: str = "unknown",
                     threshold: float = DEFAULT_THRESHOLD,
                     max_workers: int = 4,
                     logger: Optional[PipelineLogger] = None) -> EvalReport:
    """Score every frame of every record; the result does not depend on record order."""
    if not records:
        raise SplitError("no test videos to evaluate")
    predictor = as_predictor(model, threshold)
    frame_source = frame_source or VideoFrameSource()
    logger = logger or PipelineLogger()

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        scored = list(pool.map(lambda record: score_video(predictor, record, frame_source), records))

    frame_counts = ConfusionCounts()
    video_counts = {policy: ConfusionCounts() for policy in AggregationPolicy}
    groups: Dict[Tuple[SubDataset, Quality], ConfusionCounts] = {}
    for counts, result in scored:
        frame_counts = frame_counts + counts
        key = (result.sub_dataset, result.quality)
        groups[key] = groups.get(key, ConfusionCounts()) + counts
        for policy, label in result.video_labels.items():
            video_counts[policy] = video_counts[policy] + ConfusionCounts.of(result.label, label)

    breakdown = [
        BreakdownRow(sub_dataset=sub_dataset, quality=quality, counts=groups[(sub_dataset, quality)])
        for sub_dataset, quality in sorted(groups, key=lambda key: (key[0].value, key[1].value))
    ]
    report = EvalReport(
        frame_counts=frame_counts,
        video_counts=video_counts,
        breakdown=breakdown,
        videos=sorted((result for _, result in scored), key=lambda result: result.video_id),
        checkpoint_id=checkpoint_id,
        split_id=split_id,
    )
    logger.log_evaluation_complete(split_id, checkpoint_id, frame_counts.total, report.frame_accuracy)
    return report


def evaluate(model: DetectorNetwork | FramePredictor,
             test_split: SplitAssignment,
             manifest: DatasetManifest,
             frame_source: Optional[FrameSource] = None,
             checkpoint_id: str = "unknown",
             split_id: str = "test",
             threshold: float = DEFAULT_THRESHOLD,
             logger: Optional[PipelineLogger] = None) -> EvalReport:
    """Per-frame and per-video accuracy over the test videos of `manifest`."""
    records = test_split.records(manifest, Split.TEST)
    return evaluate_records(model, records, frame_source, checkpoint_id, split_id, threshold, logger=logger)
