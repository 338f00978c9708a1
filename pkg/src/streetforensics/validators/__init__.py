from .manifest_validator import ManifestValidator, validate_manifest

__all__ = [
    "ManifestValidator",
    "validate_manifest",
]
