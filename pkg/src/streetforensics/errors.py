from typing import Optional


class StreetForensicsError(Exception):
    """Base exception for the toolkit."""
    exit_code = 3


class DataError(StreetForensicsError):
    """Bad input data or configuration (CLI exit code 2)."""
    exit_code = 2


class PipelineFailure(StreetForensicsError):
    """Runtime or training failure (CLI exit code 3)."""
    exit_code = 3


class ConfigError(DataError):
    """Invalid configuration value or unknown key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ManifestError(DataError):
    """Manifest cannot be built, read or used."""

    def __init__(self, message: str, failures: Optional[list] = None):
        self.failures = failures or []
        super().__init__(message)


class EmptyCorpusError(ManifestError):
    """No videos were found under the corpus root."""


class SplitError(DataError):
    """Split ratios or strata cannot be honored."""


class MediaProbeError(DataError):
    """Container inspection failed."""


class FrameDecodeError(DataError):
    """Decoding stopped before the expected frame."""

    def __init__(self, path: str, frame_index: int, detail: str = ""):
        self.path = path
        self.frame_index = frame_index
        message = f"failed to decode frame {frame_index} of {path}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class FixtureProvenanceError(DataError):
    """Manifest was not produced by the fixture generator or was altered."""


class MissingCorpusError(DataError):
    """Paper-scale corpus is not present."""

    def __init__(self, root: str, instructions: str):
        self.root = root
        self.instructions = instructions
        super().__init__(f"corpus not found at {root}\n{instructions}")


class CheckpointError(DataError):
    """Checkpoint file is malformed or does not fit the network."""


class MatrixSpecError(DataError):
    """A condition matrix cell has no checkpoint or test split."""

    def __init__(self, row: str, column: str, message: str):
        self.row = row
        self.column = column
        super().__init__(f"cell ({row}, {column}): {message}")


class EncoderError(PipelineFailure):
    """The H.264 encoder failed or produced an inconsistent stream."""

    def __init__(self, message: str, diagnostics: str = ""):
        self.diagnostics = diagnostics
        if diagnostics:
            message = f"{message}\n--- encoder output ---\n{diagnostics.strip()}"
        super().__init__(message)


class TrainingDivergedError(PipelineFailure):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, step: int, checkpoint_path: Optional[str]):
        self.epoch = epoch
        self.step = step
        self.checkpoint_path = checkpoint_path
        super().__init__(
            f"non-finite loss at epoch {epoch}, step {step}; "
            f"diagnostic checkpoint: {checkpoint_path}"
        )


class NonFiniteGradientError(PipelineFailure):
    """A gradient contained NaN or infinity; the optimizer step was aborted."""

    def __init__(self, parameter: str):
        self.parameter = parameter
        super().__init__(f"non-finite gradient for parameter '{parameter}'")


class ShapeMismatchError(ValueError):
    """Tensor shapes are inconsistent with the operation."""


class EmptyBatchError(ValueError):
    """An operation received an empty batch."""
