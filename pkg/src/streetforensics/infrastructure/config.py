import os
from pathlib import Path
from typing import Any, Dict, Type, TypeVar

from pydantic import BaseModel, ValidationError

from ..errors import ConfigError

M = TypeVar("M", bound=BaseModel)

CORPUS_ROOT_ENV = "STREETFORENSICS_CORPUS_ROOT"


def parse_key_value_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse flat `key = value` text; `#` starts a comment, duplicates are rejected."""
    entries: Dict[str, str] = {}
    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_number}", f"expected 'key = value', got '{raw_line.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{line_number}", "empty key")
        if key in entries:
            raise ConfigError(key, f"duplicate key at {source}:{line_number}")
        entries[key] = value
    return entries


def read_key_value_file(path: str | Path) -> Dict[str, str]:
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError("config", f"file not found: {config_path}")
    return parse_key_value_text(config_path.read_text(encoding="utf-8"), source=str(config_path))


def nest_dotted(entries: Dict[str, str]) -> Dict[str, Any]:
    """Group `section.key` entries into nested dicts (one level per dot)."""
    nested: Dict[str, Any] = {}
    for key, value in entries.items():
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(key, f"'{part}' is both a value and a section")
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigError(key, "is both a value and a section")
        node[parts[-1]] = value
    return nested


def validation_error_to_config_error(error: ValidationError, prefix: str = "") -> ConfigError:
    """Name the first offending field with its dotted path."""
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"])
    if prefix:
        field = f"{prefix}.{field}" if field else prefix
    message = first["msg"]
    if first["type"] == "extra_forbidden":
        message = "unknown key"
    return ConfigError(field or "config", message)


def build_config(model: Type[M], data: Dict[str, Any], prefix: str = "") -> M:
    """Validate nested config data into a pydantic model, raising ConfigError."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise validation_error_to_config_error(e, prefix) from e


def load_config(path: str | Path, model: Type[M]) -> M:
    """Read a flat key=value file into `model`; unknown keys are rejected."""
    return build_config(model, nest_dotted(read_key_value_file(path)))


def corpus_root_override() -> str | None:
    value = os.environ.get(CORPUS_ROOT_ENV, "").strip()
    return value or None
