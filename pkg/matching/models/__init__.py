from .model import Assignment, LossWeights

__all__ = ["Assignment", "LossWeights"]
