from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, Protocol, TypeVar

import aiofiles

from ..models import DatasetManifest, SplitAssignment
from ..utils.result import Result

T = TypeVar("T")

# Parse and validation failures surface as one of these.
DECODE_ERRORS = (OSError, ValueError, KeyError, TypeError)


class RepositoryError(Exception):
    """A corpus file could not be found, parsed or written."""


class CorpusRepository(Protocol):
    """Persistence the pipeline needs: manifests, splits and plain text artifacts."""

    async def read_manifest(self, source: str) -> Result[DatasetManifest, RepositoryError]:
        ...

    async def write_manifest(self, manifest: DatasetManifest, destination: str) -> Result[bool, RepositoryError]:
        ...

    async def read_split(self, source: str) -> Result[SplitAssignment, RepositoryError]:
        ...

    async def write_split(self, assignment: SplitAssignment, destination: str) -> Result[bool, RepositoryError]:
        ...

    async def write_text(self, text: str, destination: str) -> Result[bool, RepositoryError]:
        ...


class BaseCorpusRepository(ABC):
    """File-backed repository; subclasses supply the text codecs for manifests and splits.

    Reads and writes go through aiofiles. Parent directories are created on
    write and newlines are written untranslated, so encoded text lands on
    disk byte for byte.
    """

    def __init__(self, encoding: str = "utf-8"):
        self.encoding = encoding

    @abstractmethod
    def encode_manifest(self, manifest: DatasetManifest) -> str:
        pass

    @abstractmethod
    def decode_manifest(self, text: str) -> DatasetManifest:
        pass

    @abstractmethod
    def encode_split(self, assignment: SplitAssignment) -> str:
        pass

    @abstractmethod
    def decode_split(self, text: str) -> SplitAssignment:
        pass

    async def _read(self, source: str) -> str:
        async with aiofiles.open(Path(source), mode='r', encoding=self.encoding) as file:
            return await file.read()

    async def _write(self, text: str, destination: str) -> None:
        destination_path = Path(destination)
        destination_path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(destination_path, mode='w', encoding=self.encoding, newline='') as file:
            await file.write(text)

    async def _load(self, source: str, kind: str, decode: Callable[[str], T]) -> Result[T, RepositoryError]:
        if not Path(source).exists():
            return Result.err(RepositoryError(f"{kind} file not found: {source}"))
        try:
            return Result.ok(decode(await self._read(source)))
        except DECODE_ERRORS as e:
            return Result.err(RepositoryError(f"Error reading {kind.lower()} {source}: {e}"))

    async def _store(self, text: str, destination: str) -> Result[bool, RepositoryError]:
        try:
            await self._write(text, destination)
        except OSError as e:
            return Result.err(RepositoryError(f"Error writing {destination}: {e}"))
        return Result.ok(True)

    async def read_manifest(self, source: str) -> Result[DatasetManifest, RepositoryError]:
        return await self._load(source, "Manifest", self.decode_manifest)

    async def write_manifest(self, manifest: DatasetManifest, destination: str) -> Result[bool, RepositoryError]:
        duplicates = manifest.duplicate_ids()
        if duplicates:
            return Result.err(RepositoryError(f"Refusing to write duplicate video ids: {duplicates[:5]}"))
        return await self._store(self.encode_manifest(manifest), destination)

    async def read_split(self, source: str) -> Result[SplitAssignment, RepositoryError]:
        return await self._load(source, "Split", self.decode_split)

    async def write_split(self, assignment: SplitAssignment, destination: str) -> Result[bool, RepositoryError]:
        return await self._store(self.encode_split(assignment), destination)

    async def write_text(self, text: str, destination: str) -> Result[bool, RepositoryError]:
        return await self._store(text, destination)
