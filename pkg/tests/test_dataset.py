import pytest
import os
from collections import Counter
from pathlib import Path

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from streetforensics.dataset import LayoutRule, build_manifest, largest_remainder, merge, select, split_manifest
from streetforensics.errors import EmptyCorpusError, ManifestError, MediaProbeError, SplitError
from streetforensics.media.probe import ProbeResult
from streetforensics.models import (
    DEFAULT_SPLIT_RATIOS,
    DatasetManifest,
    FindingKind,
    Label,
    Quality,
    Split,
    SubDataset,
    VideoRecord,
)
from streetforensics.repositories import JsonLinesRepository
from streetforensics.validators import ManifestValidator, validate_manifest


class StubProber:
    """Answers probes from a table instead of running ffprobe."""

    def __init__(self, frame_counts=None, unreadable=()):
        self.frame_counts = frame_counts or {}
        self.unreadable = set(unreadable)

    def probe(self, path):
        name = Path(path).name
        if name in self.unreadable:
            raise MediaProbeError(f"ffprobe failed on {path}: moov atom not found")
        return ProbeResult(codec="h264", width=1024, height=512, fps=10.0,
                           frame_count=self.frame_counts.get(name, 30))


def make_record(video_id, label=Label.REAL, sub_dataset=SubDataset.CITYVID, quality=Quality.RAW,
                path=None, source_id=None, frame_count=30):
    return VideoRecord(
        video_id=video_id,
        path=path or f"/corpus/{video_id}.mp4",
        sub_dataset=sub_dataset,
        label=label,
        quality=quality,
        frame_count=frame_count,
        width=1024,
        height=512,
        fps=10.0,
        source_id=source_id,
    )


def balanced_manifest(per_label=200, sub_dataset=SubDataset.CITYVID, quality=Quality.RAW):
    records = [
        make_record(f"{sub_dataset.value}/{quality.value}/{label.value}/{index:04d}",
                    label=label, sub_dataset=sub_dataset, quality=quality)
        for label in Label
        for index in range(per_label)
    ]
    return DatasetManifest(records=records, source_description="test corpus")


def touch(root: Path, relative: str) -> Path:
    path = root / relative
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"\x00")
    return path


class TestBuildManifest:
    """Manifest construction from a labeled directory tree."""

    @pytest.fixture
    def corpus(self, tmp_path):
        for label in ("real", "fake"):
            for index in range(200):
                touch(tmp_path, f"Cityvid/RAW/{label}/{index:04d}.mp4")
        return tmp_path

    def test_counts_and_labels(self, corpus):
        manifest = build_manifest(corpus, LayoutRule(), prober=StubProber())

        assert len(manifest) == 400
        assert manifest.label_counts() == {Label.REAL: 200, Label.FAKE: 200}
        assert all(record.frame_count == 30 for record in manifest.records)

    def test_records_are_sorted_by_relative_path(self, corpus):
        manifest = build_manifest(corpus, prober=StubProber())

        paths = [Path(record.path).relative_to(corpus).as_posix() for record in manifest.records]
        assert paths == sorted(paths)
        assert manifest.records[0].video_id == "Cityvid/RAW/fake/0000"

    def test_generator_and_source_metadata(self, corpus):
        manifest = build_manifest(corpus, prober=StubProber())
        fake = next(r for r in manifest.records if r.label is Label.FAKE)
        real = next(r for r in manifest.records if r.label is Label.REAL)

        assert fake.generator == "vid2vid"
        assert fake.mask_source == "cityscapes"
        assert real.generator is None
        assert fake.source_id == "Cityvid/fake/0000"

    def test_aliases_resolve_directory_tokens(self, tmp_path):
        touch(tmp_path, "kittivid/c40/original/clip.mp4")
        touch(tmp_path, "kittivid/c40/generated/clip.mp4")

        manifest = build_manifest(tmp_path, prober=StubProber())

        assert {(r.sub_dataset, r.quality, r.label) for r in manifest.records} == {
            (SubDataset.KITTIVID, Quality.LQ, Label.REAL),
            (SubDataset.KITTIVID, Quality.LQ, Label.FAKE),
        }

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyCorpusError, match="no videos found"):
            build_manifest(tmp_path, prober=StubProber())

    def test_missing_root(self, tmp_path):
        with pytest.raises(ManifestError):
            build_manifest(tmp_path / "absent", prober=StubProber())

    def test_non_matching_paths_are_excluded(self, tmp_path):
        touch(tmp_path, "Cityvid/RAW/real/a.mp4")
        touch(tmp_path, "stray.mp4")

        manifest = build_manifest(tmp_path, prober=StubProber())

        assert len(manifest) == 1
        assert [item.path for item in manifest.excluded] == ["stray.mp4"]

    def test_unreadable_video_fails_build(self, tmp_path):
        touch(tmp_path, "Cityvid/RAW/real/good.mp4")
        touch(tmp_path, "Cityvid/RAW/real/broken.mp4")

        with pytest.raises(ManifestError) as excinfo:
            build_manifest(tmp_path, prober=StubProber(unreadable={"broken.mp4"}))
        assert "broken.mp4" in str(excinfo.value)
        assert len(excinfo.value.failures) == 1

    def test_unreadable_video_flagged_when_permissive(self, tmp_path):
        touch(tmp_path, "Cityvid/RAW/real/good.mp4")
        touch(tmp_path, "Cityvid/RAW/real/broken.mp4")

        manifest = build_manifest(tmp_path, permissive=True, prober=StubProber(unreadable={"broken.mp4"}))

        assert [r.video_id for r in manifest.records] == ["Cityvid/RAW/real/good"]
        assert manifest.excluded[0].path == "Cityvid/RAW/real/broken.mp4"

    def test_pattern_requires_name(self):
        with pytest.raises(ValueError):
            LayoutRule(pattern="{sub_dataset}/{label}")

    def test_defaults_fill_missing_fields(self, tmp_path):
        touch(tmp_path, "fake/x.mp4")
        rule = LayoutRule(pattern="{label}/{name}", defaults={"sub_dataset": "Citywcvid", "quality": "HQ"})

        manifest = build_manifest(tmp_path, rule, prober=StubProber())

        record = manifest.records[0]
        assert (record.sub_dataset, record.quality, record.label) == (SubDataset.CITYWCVID, Quality.HQ, Label.FAKE)
        assert record.generator == "wc-vid2vid"


class TestLargestRemainder:

    def test_exact_paper_ratios(self):
        assert largest_remainder(400, DEFAULT_SPLIT_RATIOS) == [240, 100, 60]
        assert largest_remainder(200, DEFAULT_SPLIT_RATIOS) == [120, 50, 30]

    def test_leftover_goes_to_largest_fraction(self):
        # quotas 6.6 / 2.75 / 1.65
        assert largest_remainder(11, DEFAULT_SPLIT_RATIOS) == [6, 3, 2]

    def test_ties_resolve_in_split_order(self):
        assert largest_remainder(4, (1 / 3, 1 / 3, 1 / 3)) == [2, 1, 1]

    def test_total_is_preserved(self):
        for total in range(3, 60):
            assert sum(largest_remainder(total, DEFAULT_SPLIT_RATIOS)) == total


class TestSplitManifest:
    """Video-level stratified splitting."""

    def test_exact_counts(self):
        assignment = split_manifest(balanced_manifest(), DEFAULT_SPLIT_RATIOS, seed=7)

        assert assignment.counts() == {"train": 240, "val": 100, "test": 60}

    def test_deterministic(self):
        manifest = balanced_manifest()

        first = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=3)
        second = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=3)

        assert first.assignments == second.assignments
        assert list(first.assignments) == list(second.assignments)

    def test_seed_changes_membership_not_counts(self):
        manifest = balanced_manifest()

        first = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=0)
        second = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=1)

        assert first.assignments != second.assignments
        assert first.counts() == second.counts()

    def test_each_split_is_label_balanced(self):
        manifest = balanced_manifest()
        assignment = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=11)

        for split in Split:
            labels = Counter(record.label for record in assignment.records(manifest, split))
            assert labels[Label.REAL] == labels[Label.FAKE]

    def test_counts_match_stratum_enumeration(self):
        manifest = merge([
            balanced_manifest(20, SubDataset.CITYVID),
            balanced_manifest(7, SubDataset.KITTIVID, Quality.LQ),
        ])
        assignment = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=5)

        strata = {}
        for record in manifest.records:
            key = (record.sub_dataset, record.label, record.quality)
            strata.setdefault(key, Counter())[assignment.assignments[record.video_id]] += 1
        for key, counts in strata.items():
            size = sum(counts.values())
            expected = largest_remainder(size, DEFAULT_SPLIT_RATIOS)
            assert [counts[Split.TRAIN], counts[Split.VAL], counts[Split.TEST]] == expected, key

    def test_partition_is_total_and_disjoint(self):
        manifest = balanced_manifest(13)
        assignment = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=2)

        ids = [record.video_id for record in manifest.records]
        assert sorted(assignment.assignments) == sorted(ids)
        assert sum(assignment.counts().values()) == len(ids)

    def test_quality_copies_share_a_split(self):
        records = []
        for label in Label:
            for index in range(10):
                source = f"Cityvid/{label.value}/{index:02d}"
                for quality in Quality:
                    records.append(make_record(f"Cityvid/{quality.value}/{label.value}/{index:02d}",
                                               label=label, quality=quality, source_id=source))
        manifest = DatasetManifest(records=records)

        assignment = split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=9)

        by_source = {}
        for record in records:
            by_source.setdefault(record.source_id, set()).add(assignment.assignments[record.video_id])
        assert all(len(splits) == 1 for splits in by_source.values())

    def test_small_stratum_rejected(self):
        manifest = balanced_manifest(2)

        with pytest.raises(SplitError, match="at least 3"):
            split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=0)

    @pytest.mark.parametrize("ratios", [(0.5, 0.5, 0.1), (0.6, 0.4, 0.0), (0.9, 0.1)])
    def test_bad_ratios_rejected(self, ratios):
        with pytest.raises(SplitError):
            split_manifest(balanced_manifest(10), ratios, seed=0)

    def test_empty_manifest_rejected(self):
        with pytest.raises(SplitError):
            split_manifest(DatasetManifest(), DEFAULT_SPLIT_RATIOS, seed=0)

    def test_duplicate_ids_rejected(self):
        manifest = balanced_manifest(5)
        manifest = manifest.model_copy(update={"records": manifest.records + [manifest.records[0]]})

        with pytest.raises(SplitError, match="duplicate"):
            split_manifest(manifest, DEFAULT_SPLIT_RATIOS, seed=0)


class TestSelection:

    def test_select_filters_condition(self):
        manifest = merge([
            balanced_manifest(3, SubDataset.CITYVID, Quality.RAW),
            balanced_manifest(3, SubDataset.KITTIVID, Quality.LQ),
        ])

        selected = select(manifest, sub_datasets=[SubDataset.KITTIVID], labels=[Label.FAKE])

        assert len(selected) == 3
        assert {r.sub_dataset for r in selected.records} == {SubDataset.KITTIVID}

    def test_none_means_no_constraint(self):
        manifest = balanced_manifest(4)

        assert len(select(manifest)) == len(manifest)


class TestManifestValidator:
    """Validation findings; the validator itself never raises."""

    @pytest.fixture
    def on_disk(self, tmp_path):
        records = []
        for label in Label:
            for index in range(2):
                path = touch(tmp_path, f"{label.value}_{index}.mkv")
                records.append(make_record(f"{label.value}_{index}", label=label, path=str(path)))
        return DatasetManifest(records=records)

    def test_well_formed_manifest(self, on_disk):
        report = validate_manifest(on_disk, prober=StubProber())

        assert report.ok
        assert report.findings == []
        assert report.records_checked == 4

    def test_duplicate_id(self, on_disk):
        manifest = on_disk.model_copy(update={"records": on_disk.records + [on_disk.records[0]]})

        report = validate_manifest(manifest, prober=StubProber())

        duplicates = report.of_kind(FindingKind.DUPLICATE_ID)
        assert len(duplicates) == 1
        assert duplicates[0].subject == "real_0"

    def test_metadata_mismatch(self, on_disk):
        report = validate_manifest(on_disk, prober=StubProber(frame_counts={"fake_1.mkv": 29}))

        mismatches = report.of_kind(FindingKind.METADATA_MISMATCH)
        assert len(mismatches) == 1
        assert mismatches[0].subject == "fake_1"
        assert "recorded 30, probed 29" in mismatches[0].detail

    def test_missing_file(self, on_disk):
        Path(on_disk.records[0].path).unlink()

        report = validate_manifest(on_disk, prober=StubProber())

        assert [f.subject for f in report.of_kind(FindingKind.MISSING_FILE)] == ["real_0"]

    def test_unreadable_file(self, on_disk):
        report = validate_manifest(on_disk, prober=StubProber(unreadable={"real_1.mkv"}))

        assert [f.subject for f in report.of_kind(FindingKind.UNREADABLE)] == ["real_1"]

    def test_label_imbalance(self, on_disk):
        manifest = on_disk.model_copy(update={"records": on_disk.records[:3]})

        report = validate_manifest(manifest, prober=StubProber())

        imbalance = report.of_kind(FindingKind.LABEL_IMBALANCE)
        assert len(imbalance) == 1
        assert imbalance[0].subject == "Cityvid/RAW"

    def test_require_valid_returns_result(self, on_disk):
        validator = ManifestValidator(StubProber(frame_counts={"real_0.mkv": 12}))

        result = validator.require_valid(on_disk)

        assert not result.success
        assert isinstance(result.error, ManifestError)
        assert validator.require_valid(on_disk.model_copy(update={"records": []})).success

    def test_imbalance_does_not_block(self, on_disk):
        manifest = on_disk.model_copy(update={"records": on_disk.records[:3]})

        result = ManifestValidator(StubProber()).require_valid(manifest)

        assert result.success
        assert len(result.unwrap().of_kind(FindingKind.LABEL_IMBALANCE)) == 1

    def test_blocking_findings_are_listed(self, on_disk):
        Path(on_disk.records[0].path).unlink()

        result = ManifestValidator(StubProber(), probe_media=False).require_valid(on_disk)

        with pytest.raises(ManifestError, match="1 finding\\(s\\): missing_file real_0") as excinfo:
            result.unwrap()
        assert [f.kind for f in excinfo.value.failures] == [FindingKind.MISSING_FILE]


class TestJsonLinesRepository:
    """Manifest and split files survive a write/read cycle byte for byte."""

    @pytest.mark.asyncio
    async def test_manifest_file_round_trip(self, tmp_path):
        repository = JsonLinesRepository()
        manifest = balanced_manifest(3)
        destination = tmp_path / "manifest.jsonl"

        assert (await repository.write_manifest(manifest, str(destination))).success
        first_bytes = destination.read_bytes()
        loaded = (await repository.read_manifest(str(destination))).unwrap()
        await repository.write_manifest(loaded, str(destination))

        assert loaded == manifest
        assert destination.read_bytes() == first_bytes

    @pytest.mark.asyncio
    async def test_split_file_round_trip(self, tmp_path):
        repository = JsonLinesRepository()
        assignment = split_manifest(balanced_manifest(5), DEFAULT_SPLIT_RATIOS, seed=4)
        destination = tmp_path / "split.jsonl"

        await repository.write_split(assignment, str(destination))
        loaded = (await repository.read_split(str(destination))).unwrap()

        assert loaded == assignment
        assert destination.read_text(encoding="utf-8").splitlines()[1].startswith('{"video_id":')

    @pytest.mark.asyncio
    async def test_missing_file_is_an_error_result(self, tmp_path):
        result = await JsonLinesRepository().read_manifest(str(tmp_path / "absent.jsonl"))

        assert not result.success
