import re
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import EmptyCorpusError, ManifestError, MediaProbeError
from ..infrastructure import PipelineLogger
from ..media.probe import FFprobeProber, VideoProber
from ..models import (
    SUB_DATASET_PROVENANCE,
    DatasetManifest,
    ExcludedVideo,
    Label,
    Quality,
    SubDataset,
    VideoRecord,
)

PLACEHOLDERS = ("sub_dataset", "quality", "label", "name")
ENUMS = {"sub_dataset": SubDataset, "quality": Quality, "label": Label}


class LayoutRule(BaseModel):
    """Maps paths relative to the corpus root onto (sub_dataset, label, quality).

    `pattern` uses `{sub_dataset}`, `{quality}`, `{label}` and `{name}`
    placeholders, one per path component, matched against the relative
    path without its extension. `aliases` translate directory tokens
    (case-insensitive) to canonical values; `defaults` fill fields the
    pattern does not mention.
    """

    model_config = ConfigDict(frozen=True)

    pattern: str = "{sub_dataset}/{quality}/{label}/{name}"
    extensions: List[str] = Field(default_factory=lambda: [".mp4", ".mkv", ".avi", ".mov"])
    aliases: Dict[str, str] = Field(default_factory=lambda: {
        "original": "real",
        "genuine": "real",
        "synthetic": "fake",
        "generated": "fake",
        "raw": "RAW",
        "c23": "HQ",
        "c40": "LQ",
    })
    defaults: Dict[str, str] = Field(default_factory=dict)

    @field_validator("pattern")
    @classmethod
    def validate_pattern(cls, v: str) -> str:
        used = re.findall(r"\{(\w+)\}", v)
        unknown = set(used) - set(PLACEHOLDERS)
        if unknown:
            raise ValueError(f"unknown placeholders: {sorted(unknown)}")
        if "name" not in used:
            raise ValueError("pattern must contain {name}")
        return v

    def regex(self) -> re.Pattern:
        parts = re.split(r"(\{\w+\})", self.pattern)
        expression = "".join(
            f"(?P<{part[1:-1]}>[^/]+)" if part.startswith("{") else re.escape(part)
            for part in parts
        )
        return re.compile(f"^{expression}$")

    def resolve(self, field: str, token: str):
        canonical = self.aliases.get(token.lower(), token)
        enum = ENUMS[field]
        for member in enum:
            if member.value.lower() == canonical.lower():
                return member
        raise ValueError(f"'{token}' is not a valid {field}")

    def classify(self, relative: str) -> Optional[Dict[str, object]]:
        """Return resolved fields for a relative path, or None if it does not match."""
        stem = relative.rsplit(".", 1)[0]
        match = self.regex().match(stem)
        if match is None:
            return None
        tokens = {**self.defaults, **match.groupdict()}
        fields: Dict[str, object] = {"name": tokens["name"]}
        for field in ENUMS:
            if field not in tokens:
                raise ValueError(f"layout does not determine {field} for {relative}")
            fields[field] = self.resolve(field, tokens[field])
        fields["video_id"] = stem
        if "quality" in match.groupdict():
            fields["source_id"] = "/".join(
                match.group(key) for key in ("sub_dataset", "label", "name") if key in match.groupdict()
            )
        return fields


def discover_videos(root: Path, rule: LayoutRule) -> List[Path]:
    extensions = {ext.lower() for ext in rule.extensions}
    return sorted(
        (path for path in root.rglob("*") if path.is_file() and path.suffix.lower() in extensions),
        key=lambda path: path.relative_to(root).as_posix(),
    )


def build_manifest(root: str | Path,
                   labeling_rule: Optional[LayoutRule] = None,
                   permissive: bool = False,
                   prober: Optional[VideoProber] = None,
                   logger: Optional[PipelineLogger] = None) -> DatasetManifest:
    """Probe every video under `root` and label it from its location.

    Records are ordered lexicographically by relative path. Unreadable
    videos fail the build unless `permissive` is set, in which case they
    are listed in `excluded`.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise ManifestError(f"corpus root is not a directory: {root_path}")
    rule = labeling_rule or LayoutRule()
    prober = prober or FFprobeProber()
    logger = logger or PipelineLogger()

    paths = discover_videos(root_path, rule)
    if not paths:
        raise EmptyCorpusError(f"no videos found under {root_path}")

    records: List[VideoRecord] = []
    excluded: List[ExcludedVideo] = []
    failures: List[ExcludedVideo] = []
    for path in paths:
        relative = path.relative_to(root_path).as_posix()
        try:
            fields = rule.classify(relative)
        except ValueError as e:
            failures.append(ExcludedVideo(path=relative, reason=str(e)))
            continue
        if fields is None:
            excluded.append(ExcludedVideo(path=relative, reason="path does not match layout pattern"))
            continue

        try:
            probed = prober.probe(path)
        except MediaProbeError as e:
            logger.log_video_unreadable(relative, str(e), permissive)
            failures.append(ExcludedVideo(path=relative, reason=str(e)))
            continue

        generator, mask_source = SUB_DATASET_PROVENANCE.get(fields["sub_dataset"], (None, None))
        record = VideoRecord(
            video_id=fields["video_id"],
            path=str(path),
            sub_dataset=fields["sub_dataset"],
            label=fields["label"],
            quality=fields["quality"],
            frame_count=probed.frame_count,
            width=probed.width,
            height=probed.height,
            fps=probed.fps,
            source_id=fields.get("source_id"),
            generator=generator if fields["label"] is Label.FAKE else None,
            mask_source=mask_source,
        )
        logger.log_video_discovered(record.video_id, relative, record.frame_count)
        records.append(record)

    if failures and not permissive:
        raise ManifestError(
            f"{len(failures)} video(s) could not be ingested; first: {failures[0].path} ({failures[0].reason})",
            failures=failures,
        )
    if not records:
        raise EmptyCorpusError(f"no videos found under {root_path} matching {rule.pattern}")

    excluded.extend(failures)
    logger.log_manifest_built(str(root_path), len(records), len(excluded))
    return DatasetManifest(
        records=records,
        source_description=f"ingested from {root_path} with layout {rule.pattern}",
        excluded=excluded,
    )
