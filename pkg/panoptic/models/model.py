from typing import Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


# ========== Panoptic Prediction ==========

class PanopticPrediction(BaseModel):
    """Exclusive per-point group assignment from the last decoder stage."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    group_of_point: np.ndarray = Field(..., description="Winning classifier per point (length K)")
    class_of_group: np.ndarray = Field(..., description="Semantic class per classifier (length N)")
    group_confidence: np.ndarray = Field(..., description="Max semantic score per classifier (length N)")
    active_groups: List[int] = Field(default_factory=list, description="Classifiers owning at least one point")

    @model_validator(mode="after")
    def check_shapes(self) -> "PanopticPrediction":
        self.group_of_point = np.asarray(self.group_of_point, dtype=np.int64).reshape(-1)
        self.class_of_group = np.asarray(self.class_of_group, dtype=np.int64).reshape(-1)
        self.group_confidence = np.asarray(self.group_confidence, dtype=np.float64).reshape(-1)
        N = self.class_of_group.shape[0]
        if self.group_confidence.shape[0] != N:
            raise ValueError(f"{N} group classes but {self.group_confidence.shape[0]} confidences")
        if self.group_of_point.size and (self.group_of_point.min() < 0 or self.group_of_point.max() >= N):
            raise ValueError(f"group indices must lie in 0..{N - 1}")
        return self

    @property
    def K(self) -> int:
        return int(self.group_of_point.shape[0])

    @property
    def N(self) -> int:
        return int(self.class_of_group.shape[0])

    def semantic_of_point(self) -> np.ndarray:
        return self.class_of_group[self.group_of_point]

    def membership(self) -> np.ndarray:
        """N×K one-hot matrix of the assignment."""
        out = np.zeros((self.N, self.K), dtype=bool)
        out[self.group_of_point, np.arange(self.K)] = True
        return out


# ========== PQ Report ==========

class ClassQuality(BaseModel):
    name: str
    is_thing: bool
    tp: int = 0
    fp: int = 0
    fn: int = 0
    iou_sum: float = 0.0
    pq: float = 0.0
    sq: float = 0.0
    rq: float = 0.0
    semantic_iou: float = 0.0
    present: bool = False


class PQReport(BaseModel):
    """Panoptic quality over a set of scenes; means run over classes present in GT or prediction."""

    pq: float = 0.0
    sq: float = 0.0
    rq: float = 0.0
    pq_dagger: float = 0.0
    pq_things: float = 0.0
    sq_things: float = 0.0
    rq_things: float = 0.0
    pq_stuff: float = 0.0
    sq_stuff: float = 0.0
    rq_stuff: float = 0.0
    scenes: int = 0
    taxonomy: str = ""
    per_class: Dict[int, ClassQuality] = Field(default_factory=dict)
