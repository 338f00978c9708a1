import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class TrainingLogEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int = Field(..., ge=1)
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    wall_seconds: float


class TrainingLog:
    """Append-only epoch records, mirrored line by line to `path` when given."""

    def __init__(self, path: Optional[str | Path] = None):
        self.path = Path(path) if path else None
        self.entries: List[TrainingLogEntry] = []
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("", encoding="utf-8")

    def append(self, entry: TrainingLogEntry) -> None:
        self.entries.append(entry)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry.model_dump(), separators=(",", ":")) + "\n")

    def best(self) -> Optional[TrainingLogEntry]:
        return min(self.entries, key=lambda entry: (entry.val_loss, entry.epoch)) if self.entries else None
