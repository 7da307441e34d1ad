"""Error types raised across the segmentation pipeline."""


class PupsError(ValueError):
    """Base class for all pipeline errors."""


class DimensionError(PupsError):
    pass


class ContractError(PupsError):
    pass


class SceneGenerationError(PupsError):
    pass


class LabelEncodingError(PupsError):
    pass


class LabelFormatError(PupsError):
    pass


class CheckpointFormatError(PupsError):
    pass


class CapacityError(PupsError):
    pass


class ConfigError(PupsError):
    pass


class TrainingDivergedError(PupsError):
    """Raised when a training step produces a non-finite loss."""
