from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import SplitError
from ..infrastructure import PipelineLogger
from ..models import DEFAULT_SPLIT_RATIOS, DatasetManifest, Split, SplitAssignment, VideoRecord

SPLIT_ORDER = (Split.TRAIN, Split.VAL, Split.TEST)
MIN_STRATUM_SIZE = 3

StratumKey = Tuple[str, str, Tuple[str, ...]]


def largest_remainder(total: int, ratios: Sequence[float]) -> List[int]:
    """Apportion `total` units to `ratios`; leftover units go to the largest fractional parts.

    Ties in the fractional part resolve in split order (train, val, test).
    """
    exact = [Fraction(repr(float(ratio))) for ratio in ratios]
    scale = sum(exact)
    quotas = [total * ratio / scale for ratio in exact]
    counts = [int(quota) for quota in quotas]
    leftover = total - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def check_ratios(ratios: Sequence[float]) -> Tuple[float, float, float]:
    if len(ratios) != 3:
        raise SplitError(f"expected three split ratios, got {len(ratios)}")
    if any(ratio <= 0 for ratio in ratios):
        raise SplitError(f"split ratios must be positive, got {tuple(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"split ratios must sum to 1, got {sum(ratios):g}")
    return tuple(float(ratio) for ratio in ratios)


def source_groups(manifest: DatasetManifest) -> Dict[str, List[VideoRecord]]:
    """Records keyed by source group, groups ordered by their first path."""
    groups: Dict[str, List[VideoRecord]] = {}
    for record in sorted(manifest.records, key=lambda r: (r.path, r.video_id)):
        groups.setdefault(record.group_id, []).append(record)
    return groups


def stratum_of(group_id: str, members: List[VideoRecord]) -> StratumKey:
    first = members[0]
    for record in members[1:]:
        if (record.sub_dataset, record.label) != (first.sub_dataset, first.label):
            raise SplitError(
                f"source group '{group_id}' mixes sub-datasets or labels; "
                f"cannot keep its copies in one split"
            )
    qualities = tuple(sorted({record.quality.value for record in members}))
    return (first.sub_dataset.value, first.label.value, qualities)


def split_manifest(manifest: DatasetManifest,
                   ratios: Sequence[float] = DEFAULT_SPLIT_RATIOS,
                   seed: int = 0,
                   logger: PipelineLogger | None = None) -> SplitAssignment:
    """Video-level train/val/test assignment, stratified by (sub_dataset, label, quality).

    Every quality copy of one source video lands in the same split. Within
    each stratum, source groups are ordered by path, shuffled by a generator
    seeded once from `seed`, and cut by largest-remainder counts.
    """
    ratios = check_ratios(ratios)
    if not manifest.records:
        raise SplitError("cannot split an empty manifest")
    if manifest.duplicate_ids():
        raise SplitError(f"duplicate video_id in manifest: {', '.join(manifest.duplicate_ids()[:5])}")

    strata: Dict[StratumKey, List[str]] = {}
    groups = source_groups(manifest)
    for group_id, members in groups.items():
        strata.setdefault(stratum_of(group_id, members), []).append(group_id)

    rng = np.random.default_rng(seed)
    group_split: Dict[str, Split] = {}
    for key in sorted(strata):
        group_ids = strata[key]
        if len(group_ids) < MIN_STRATUM_SIZE:
            raise SplitError(
                f"stratum {key[0]}/{key[1]}/{'+'.join(key[2])} has {len(group_ids)} video(s); "
                f"at least {MIN_STRATUM_SIZE} are needed for a three-way split"
            )
        order = rng.permutation(len(group_ids))
        counts = largest_remainder(len(group_ids), ratios)
        boundaries = np.cumsum(counts)
        for position, index in enumerate(order):
            split = SPLIT_ORDER[int(np.searchsorted(boundaries, position, side="right"))]
            group_split[group_ids[index]] = split

    assignment = SplitAssignment(
        assignments={record.video_id: group_split[record.group_id] for record in manifest.records},
        seed=seed,
        ratios=ratios,
    )
    (logger or PipelineLogger()).log_split_complete(seed, assignment.counts())
    return assignment
