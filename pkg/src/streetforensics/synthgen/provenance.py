"""Fixture provenance: the block stored in a generated manifest and its human-readable form."""

import hashlib
from typing import Any, Dict, List

from ..errors import FixtureProvenanceError
from ..models import DatasetManifest, FixtureConfig, Label
from ..repositories.jsonl_repository import dump_line

GENERATOR_MARKER = "streetforensics.synthgen"
PROVENANCE_VERSION = 1


def record_checksum(manifest: DatasetManifest) -> str:
    """sha256 over canonical record lines; paths are left out so a fixture can be moved."""
    digest = hashlib.sha256()
    for record in manifest.records:
        digest.update(dump_line(record.model_dump(mode="json", exclude={"path"})).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def build_provenance(manifest: DatasetManifest, config: FixtureConfig, statistics: Dict[str, float]) -> Dict[str, Any]:
    counts = manifest.label_counts()
    return {
        "generator": GENERATOR_MARKER,
        "version": PROVENANCE_VERSION,
        "fixture_config": config.model_dump(mode="json"),
        "counts": {label.value: counts.get(label, 0) for label in Label},
        "statistics": statistics,
        "checksum": record_checksum(manifest),
    }


def verify_provenance(manifest: DatasetManifest) -> Dict[str, Any]:
    provenance = manifest.provenance or {}
    if provenance.get("generator") != GENERATOR_MARKER:
        raise FixtureProvenanceError("manifest was not produced by the fixture generator")
    if provenance.get("checksum") != record_checksum(manifest):
        raise FixtureProvenanceError("manifest records do not match their recorded checksum")
    try:
        FixtureConfig.model_validate(provenance.get("fixture_config"))
    except ValueError as e:
        raise FixtureProvenanceError(f"fixture config in provenance is invalid: {e}") from e
    return provenance


def describe_fixture(manifest: DatasetManifest) -> str:
    """Provenance document for a generated fixture manifest.

    Two fixtures generated from configs that differ only in seed yield
    documents that differ only in the seed and statistics lines.
    """
    provenance = verify_provenance(manifest)
    config = provenance["fixture_config"]
    counts = provenance["counts"]

    lines: List[str] = [
        "Synthetic fixture provenance",
        f"generator: {provenance['generator']} v{provenance['version']}",
        f"checksum: {provenance['checksum']}",
        "config:",
    ]
    lines.extend(f"  {key}: {config[key]}" for key in sorted(config))
    lines.append("counts: " + " ".join(f"{label}={counts[label]}" for label in sorted(counts)))
    lines.append("statistics:")
    lines.extend(
        f"  {key}: {value:.4f}" for key, value in sorted(provenance.get("statistics", {}).items())
    )
    return "\n".join(lines) + "\n"
