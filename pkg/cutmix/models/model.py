from enum import Enum
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PlacementMode(str, Enum):
    CONTEXT = "context"
    RANDOM = "random"


# ========== Instance Database ==========

class InstanceEntry(BaseModel):
    """One cut-out instance in local coordinates (xyz relative to its centroid)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray
    class_id: int
    centroid: List[float] = Field(..., description="Original centroid (x, y, z)")
    ground_offset: float = Field(..., ge=0, description="Centroid height above the instance's lowest point")
    scene_id: int = 0

    @field_validator("points")
    def validate_points(cls, v: np.ndarray) -> np.ndarray:
        v = np.ascontiguousarray(v, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 4 or v.shape[0] == 0:
            raise ValueError(f"instance points must be a nonempty (P, 4) array, got {v.shape}")
        return v

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def placed_at(self, centroid: np.ndarray) -> np.ndarray:
        out = self.points.copy()
        out[:, :3] += np.asarray(centroid, dtype=np.float64)
        return out


class InstanceDB(BaseModel):
    entries: List[InstanceEntry] = Field(default_factory=list)

    @property
    def by_class(self) -> Dict[int, List[int]]:
        index: Dict[int, List[int]] = {}
        for i, entry in enumerate(self.entries):
            index.setdefault(entry.class_id, []).append(i)
        return index

    def __len__(self) -> int:
        return len(self.entries)

    def counts(self) -> Dict[int, int]:
        return {cls: len(ids) for cls, ids in sorted(self.by_class.items())}


# ========== Mix Policy ==========

class MixPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples_per_class: Dict[int, int] = Field(default_factory=dict, description="Instances pasted per scene, by class")
    mode: PlacementMode = PlacementMode.CONTEXT
    max_attempts: int = Field(10, ge=1)
    min_separation: float = Field(1.0, ge=0, description="Planar gap to existing instance points (m)")
    removal_radius: float = Field(0.1, gt=0, description="Scene points closer than this to a pasted point are dropped (m)")
    snap_radius: float = Field(0.5, gt=0, description="Support point must have a compatible context point this close (m)")
    random_yaw: bool = True

    @field_validator("samples_per_class")
    def check_counts(cls, v: Dict[int, int]) -> Dict[int, int]:
        if any(n < 0 for n in v.values()):
            raise ValueError("sample counts must be nonnegative")
        return v


# ========== Mix Summary ==========

class MixSummary(BaseModel):
    requested: int = 0
    placed: int = 0
    skipped: int = 0
    context_violations: int = 0
    removed_points: int = 0
    removed_groups: int = 0
    placed_by_class: Dict[int, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_bookkeeping(self) -> "MixSummary":
        if self.placed + self.skipped != self.requested:
            raise ValueError("placed and skipped must add up to the requested count")
        return self

    def merge(self, other: "MixSummary") -> "MixSummary":
        by_class = dict(self.placed_by_class)
        for cls, n in other.placed_by_class.items():
            by_class[cls] = by_class.get(cls, 0) + n
        return MixSummary(
            requested=self.requested + other.requested,
            placed=self.placed + other.placed,
            skipped=self.skipped + other.skipped,
            context_violations=self.context_violations + other.context_violations,
            removed_points=self.removed_points + other.removed_points,
            removed_groups=self.removed_groups + other.removed_groups,
            placed_by_class=by_class,
        )
