from typing import Iterable, List, Optional

from ..models import DatasetManifest, Label, Quality, SubDataset


def select(manifest: DatasetManifest,
           sub_datasets: Optional[Iterable[SubDataset]] = None,
           qualities: Optional[Iterable[Quality]] = None,
           labels: Optional[Iterable[Label]] = None) -> DatasetManifest:
    """Filter a manifest into one experiment condition; None means no constraint."""
    wanted_sub = set(sub_datasets) if sub_datasets is not None else None
    wanted_quality = set(qualities) if qualities is not None else None
    wanted_label = set(labels) if labels is not None else None
    records = [
        record for record in manifest.records
        if (wanted_sub is None or record.sub_dataset in wanted_sub)
        and (wanted_quality is None or record.quality in wanted_quality)
        and (wanted_label is None or record.label in wanted_label)
    ]
    return manifest.model_copy(update={"records": records, "excluded": []})


def merge(manifests: List[DatasetManifest], source_description: str = "") -> DatasetManifest:
    """Concatenate manifests in order; provenance is dropped."""
    records = [record for manifest in manifests for record in manifest.records]
    description = source_description or " + ".join(
        manifest.source_description for manifest in manifests if manifest.source_description
    )
    return DatasetManifest(records=records, source_description=description)
