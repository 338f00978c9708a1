from typing import List, Optional

from ..errors import ManifestError
from ..infrastructure import PipelineLogger
from ..media.frame_source import FrameSource
from ..models import (
    DEFAULT_THRESHOLD,
    DatasetManifest,
    EvalReport,
    Label,
    Split,
    SplitAssignment,
    SubDataset,
    VideoRecord,
)
from ..network import DetectorNetwork
from .evaluator import FramePredictor, evaluate_records


def training_records(manifest: DatasetManifest,
                     real_source: SubDataset,
                     fake_source: SubDataset) -> List[VideoRecord]:
    """Reals of `real_source` and fakes of `fake_source`: the detector's training population."""
    return [
        record for record in manifest.records
        if (record.label is Label.REAL and record.sub_dataset is real_source)
        or (record.label is Label.FAKE and record.sub_dataset is fake_source)
    ]


def heldout_records(manifest: DatasetManifest,
                    split: SplitAssignment,
                    real_source: SubDataset,
                    heldout_fakes: SubDataset) -> List[VideoRecord]:
    """Test-split reals of `real_source` and test-split fakes of `heldout_fakes`."""
    return [
        record for record in split.records(manifest, Split.TEST)
        if (record.label is Label.REAL and record.sub_dataset is real_source)
        or (record.label is Label.FAKE and record.sub_dataset is heldout_fakes)
    ]


def run_unseen_generator_eval(model: DetectorNetwork | FramePredictor,
                              manifest: DatasetManifest,
                              split: SplitAssignment,
                              fake_source: SubDataset,
                              real_source: SubDataset,
                              heldout_fakes: SubDataset,
                              frame_source: Optional[FrameSource] = None,
                              checkpoint_id: str = "unknown",
                              threshold: float = DEFAULT_THRESHOLD,
                              logger: Optional[PipelineLogger] = None) -> EvalReport:
    """Evaluate a detector trained on real_source reals vs fake_source fakes against fakes it never saw."""
    records = heldout_records(manifest, split, real_source, heldout_fakes)
    if not any(record.label is Label.FAKE for record in records):
        raise ManifestError(f"no held-out {heldout_fakes.value} fakes in the test split")
    report = evaluate_records(model, records, frame_source, checkpoint_id=checkpoint_id,
                              split_id=f"test:{real_source.value}-real+{heldout_fakes.value}-fake",
                              threshold=threshold, logger=logger)
    note = (f"unseen generator: trained on {real_source.value} reals vs {fake_source.value} fakes; "
            f"tested on {heldout_fakes.value} fakes")
    return report.model_copy(update={"notes": [*report.notes, note]})
