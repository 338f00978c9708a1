from pathlib import Path
from typing import FrozenSet, List, Optional

from ..errors import ManifestError, MediaProbeError
from ..media.probe import FFprobeProber, VideoProber
from ..models import (
    DatasetManifest,
    Finding,
    FindingKind,
    Label,
    ValidationReport,
    VideoRecord,
)
from ..utils.result import Result

# Findings that make a manifest unusable for training or evaluation; imbalance is advisory.
BLOCKING_FINDINGS: FrozenSet[FindingKind] = frozenset({
    FindingKind.DUPLICATE_ID,
    FindingKind.MISSING_FILE,
    FindingKind.UNREADABLE,
    FindingKind.METADATA_MISMATCH,
})


class ManifestValidator:
    """Checks a manifest against the files it describes.

    Every problem becomes a Finding; validation itself never raises.
    """

    def __init__(self, prober: Optional[VideoProber] = None, probe_media: bool = True):
        self.prober = prober or FFprobeProber()
        self.probe_media = probe_media

    def check_duplicates(self, manifest: DatasetManifest) -> List[Finding]:
        return [
            Finding(kind=FindingKind.DUPLICATE_ID, subject=video_id,
                    detail="video_id appears more than once")
            for video_id in manifest.duplicate_ids()
        ]

    def check_record(self, record: VideoRecord) -> List[Finding]:
        if not Path(record.path).exists():
            return [Finding(kind=FindingKind.MISSING_FILE, subject=record.video_id,
                            detail=f"no file at {record.path}")]
        if not self.probe_media:
            return []

        try:
            probed = self.prober.probe(record.path)
        except MediaProbeError as e:
            return [Finding(kind=FindingKind.UNREADABLE, subject=record.video_id, detail=str(e))]

        findings = []
        if probed.frame_count != record.frame_count:
            findings.append(Finding(
                kind=FindingKind.METADATA_MISMATCH, subject=record.video_id,
                detail=f"frame_count recorded {record.frame_count}, probed {probed.frame_count}",
            ))
        if (probed.width, probed.height) != (record.width, record.height):
            findings.append(Finding(
                kind=FindingKind.METADATA_MISMATCH, subject=record.video_id,
                detail=f"resolution recorded {record.width}x{record.height}, "
                       f"probed {probed.width}x{probed.height}",
            ))
        return findings

    def check_balance(self, manifest: DatasetManifest) -> List[Finding]:
        findings = []
        for (sub_dataset, quality), counts in manifest.strata().items():
            if counts[Label.REAL] != counts[Label.FAKE]:
                findings.append(Finding(
                    kind=FindingKind.LABEL_IMBALANCE,
                    subject=f"{sub_dataset.value}/{quality.value}",
                    detail=f"{counts[Label.REAL]} real vs {counts[Label.FAKE]} fake",
                ))
        return findings

    def validate(self, manifest: DatasetManifest) -> ValidationReport:
        findings = self.check_duplicates(manifest)
        for record in manifest.records:
            findings.extend(self.check_record(record))
        findings.extend(self.check_balance(manifest))
        return ValidationReport(findings=findings, records_checked=len(manifest.records))

    def require_valid(self,
                      manifest: DatasetManifest,
                      blocking: FrozenSet[FindingKind] = BLOCKING_FINDINGS) -> Result[ValidationReport, ManifestError]:
        """Ok unless a finding of a `blocking` kind is present; the error lists those findings."""
        report = self.validate(manifest)
        blockers = [finding for finding in report.findings if finding.kind in blocking]
        if not blockers:
            return Result.ok(report)
        summary = "; ".join(f"{f.kind.value} {f.subject}" for f in blockers[:5])
        return Result.err(ManifestError(f"{len(blockers)} finding(s): {summary}", failures=blockers))


def validate_manifest(manifest: DatasetManifest,
                      prober: Optional[VideoProber] = None,
                      probe_media: bool = True) -> ValidationReport:
    return ManifestValidator(prober, probe_media).validate(manifest)
