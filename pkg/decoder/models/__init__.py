from .model import ClassifierBank, RefineStageParams, StageOutput

__all__ = ["ClassifierBank", "RefineStageParams", "StageOutput"]
