from .model import ClassQuality, PanopticPrediction, PQReport

__all__ = ["ClassQuality", "PanopticPrediction", "PQReport"]
