import json
from typing import Any, Dict

from pydantic import ValidationError

from ..models import DatasetManifest, SplitAssignment, VideoRecord
from .base import BaseCorpusRepository


def dump_line(payload: Dict[str, Any]) -> str:
    """Canonical single-line JSON used by every line-delimited format."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def manifest_to_text(manifest: DatasetManifest) -> str:
    header = {
        "schema_version": manifest.schema_version,
        "source_description": manifest.source_description,
        "provenance": manifest.provenance,
        "excluded": [item.model_dump(mode="json") for item in manifest.excluded],
    }
    lines = [dump_line(header)]
    lines.extend(dump_line(record.model_dump(mode="json")) for record in manifest.records)
    return "\n".join(lines) + "\n"


def manifest_from_text(text: str) -> DatasetManifest:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("manifest file is empty")
    header = json.loads(lines[0])
    if "schema_version" not in header:
        raise ValueError("manifest header line is missing schema_version")
    records = []
    for line_number, line in enumerate(lines[1:], 2):
        try:
            records.append(VideoRecord.model_validate(json.loads(line)))
        except (ValidationError, json.JSONDecodeError) as e:
            raise ValueError(f"invalid record on line {line_number}: {e}") from e
    return DatasetManifest(records=records, **header)


def split_to_text(assignment: SplitAssignment) -> str:
    header = {
        "schema_version": assignment.schema_version,
        "seed": assignment.seed,
        "ratios": list(assignment.ratios),
    }
    lines = [dump_line(header)]
    lines.extend(
        dump_line({"video_id": video_id, "split": split.value})
        for video_id, split in assignment.assignments.items()
    )
    return "\n".join(lines) + "\n"


def split_from_text(text: str) -> SplitAssignment:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("split file is empty")
    header = json.loads(lines[0])
    assignments = {}
    for line in lines[1:]:
        entry = json.loads(line)
        if entry["video_id"] in assignments:
            raise ValueError(f"video_id {entry['video_id']} assigned twice")
        assignments[entry["video_id"]] = entry["split"]
    return SplitAssignment(
        assignments=assignments,
        seed=header["seed"],
        ratios=tuple(header["ratios"]),
        schema_version=header.get("schema_version", 1),
    )


class JsonLinesRepository(BaseCorpusRepository):
    """Line-delimited JSON manifests and splits: a header line, then one object per line."""

    def encode_manifest(self, manifest: DatasetManifest) -> str:
        return manifest_to_text(manifest)

    def decode_manifest(self, text: str) -> DatasetManifest:
        return manifest_from_text(text)

    def encode_split(self, assignment: SplitAssignment) -> str:
        return split_to_text(assignment)

    def decode_split(self, text: str) -> SplitAssignment:
        return split_from_text(text)
