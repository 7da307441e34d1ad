from .model import (
    AugmentSection,
    CutMixSection,
    DataSection,
    ModelSection,
    OptimSection,
    RunConfig,
    SweepSection,
)

__all__ = [
    "AugmentSection",
    "CutMixSection",
    "DataSection",
    "ModelSection",
    "OptimSection",
    "RunConfig",
    "SweepSection",
]
