from .inference import infer, prediction_segments
from .evaluator import (
    PQAccumulator,
    evaluate_kitti_files,
    evaluate_many,
    pq_evaluate,
    score_prediction,
    score_segments,
)

__all__ = [
    "infer",
    "prediction_segments",
    "PQAccumulator",
    "evaluate_kitti_files",
    "evaluate_many",
    "pq_evaluate",
    "score_prediction",
    "score_segments",
]
