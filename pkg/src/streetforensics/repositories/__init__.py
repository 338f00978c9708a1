from .base import CorpusRepository, BaseCorpusRepository, RepositoryError
from .jsonl_repository import (
    JsonLinesRepository,
    dump_line,
    manifest_from_text,
    manifest_to_text,
    split_from_text,
    split_to_text,
)

__all__ = [
    "CorpusRepository",
    "BaseCorpusRepository",
    "RepositoryError",
    "JsonLinesRepository",
    "dump_line",
    "manifest_from_text",
    "manifest_to_text",
    "split_from_text",
    "split_to_text",
]
