from typing import Sequence

from ..errors import EmptyBatchError
from ..models import DEFAULT_THRESHOLD, AggregationPolicy, FramePrediction, Label


def aggregate_video(frame_predictions: Sequence[FramePrediction],
                    policy: AggregationPolicy | str = AggregationPolicy.MAJORITY,
                    threshold: float = DEFAULT_THRESHOLD) -> Label:
    """Collapse one video's frame predictions into a video label.

    majority: most frame votes, ties go to fake.
    mean_score: mean score_fake compared against `threshold`.
    """
    if not frame_predictions:
        raise EmptyBatchError("cannot aggregate a video with no frame predictions")
    policy = AggregationPolicy(policy)
    if policy is AggregationPolicy.MAJORITY:
        fake_votes = sum(1 for p in frame_predictions if p.predicted_label is Label.FAKE)
        return Label.FAKE if 2 * fake_votes >= len(frame_predictions) else Label.REAL
    mean_score = sum(p.score_fake for p in frame_predictions) / len(frame_predictions)
    return Label.FAKE if mean_score >= threshold else Label.REAL
