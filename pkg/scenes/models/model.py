from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ========== Class Taxonomy ==========

class ClassTaxonomy(BaseModel):
    """Thing/stuff split of the semantic classes 1..T plus the thing→stuff context table."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field("custom", description="Preset or file name")
    class_names: Dict[int, str] = Field(..., description="Class ID → human readable name")
    thing_classes: List[int] = Field(..., description="Countable classes")
    stuff_classes: List[int] = Field(..., description="Uncountable classes")
    context_table: Dict[int, List[int]] = Field(
        default_factory=dict, description="Thing class → ordered compatible stuff classes"
    )
    label_map: Dict[int, int] = Field(
        default_factory=dict,
        description="Raw .label semantic ID → class ID (0 = void); empty means identity",
    )

    @model_validator(mode="after")
    def check_partition(self) -> "ClassTaxonomy":
        things, stuff = set(self.thing_classes), set(self.stuff_classes)
        if things & stuff:
            raise ValueError(f"thing and stuff classes overlap: {sorted(things & stuff)}")
        expected = set(range(1, len(things) + len(stuff) + 1))
        if things | stuff != expected:
            raise ValueError("thing and stuff classes must cover 1..T exactly")
        if set(self.class_names) != expected:
            raise ValueError("class_names must name every class 1..T")
        for thing, contexts in self.context_table.items():
            if thing not in things:
                raise ValueError(f"context_table key {thing} is not a thing class")
            if not set(contexts) <= stuff:
                raise ValueError(f"context_table[{thing}] holds non-stuff classes {contexts}")
        for raw, cls in self.label_map.items():
            if cls != 0 and cls not in expected:
                raise ValueError(f"label_map sends raw label {raw} to unknown class {cls}")
        return self

    @property
    def T(self) -> int:
        return len(self.class_names)

    @property
    def stuff_slots(self) -> List[int]:
        """Stuff classes in the order of their reserved classifier slots."""
        return sorted(self.stuff_classes)

    def is_thing(self, class_id: int) -> bool:
        return class_id in self.thing_classes

    def is_stuff(self, class_id: int) -> bool:
        return class_id in self.stuff_classes

    def class_id(self, name: str) -> int:
        for cid, cname in self.class_names.items():
            if cname == name:
                return cid
        raise KeyError(f"class '{name}' not in taxonomy '{self.name}'")

    def semantic_map(self) -> Dict[int, int]:
        """Class ID → raw label written to .label files (lowest raw ID wins)."""
        if not self.label_map:
            return {cid: cid for cid in self.class_names}
        out: Dict[int, int] = {}
        for raw in sorted(self.label_map):
            cls = self.label_map[raw]
            if cls != 0 and cls not in out:
                out[cls] = raw
        return out


# ========== Point Cloud ==========

class PointCloud(BaseModel):
    """K points as rows of (x, y, z, intensity)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray

    @field_validator("points")
    def validate_points(cls, v: np.ndarray) -> np.ndarray:
        v = np.ascontiguousarray(v, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 4:
            raise ValueError(f"points must have shape (K, 4), got {v.shape}")
        if v.shape[0] < 1:
            raise ValueError("a point cloud needs at least one point")
        if not np.all(np.isfinite(v)):
            raise ValueError("point coordinates must be finite")
        if np.any(v[:, 3] < 0) or np.any(v[:, 3] > 1):
            raise ValueError("intensity must lie in [0, 1]")
        return v

    @property
    def K(self) -> int:
        return int(self.points.shape[0])

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def intensity(self) -> np.ndarray:
        return self.points[:, 3]

    def subset(self, keep: np.ndarray) -> "PointCloud":
        return PointCloud(points=self.points[keep])

    def equals(self, other: "PointCloud") -> bool:
        return self.points.shape == other.points.shape and np.array_equal(self.points, other.points)


# ========== Ground Truth ==========

class GroundTruth(BaseModel):
    """
    M exclusive binary masks over K points with one semantic class each.
    Points flagged in ``void`` belong to no group and are ignored by evaluation.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    masks: np.ndarray
    classes: np.ndarray
    void: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def check_partition(self) -> "GroundTruth":
        masks = np.asarray(self.masks, dtype=bool)
        if masks.ndim != 2:
            raise ValueError(f"masks must be (M, K), got {masks.shape}")
        classes = np.asarray(self.classes, dtype=np.int64).reshape(-1)
        if classes.shape[0] != masks.shape[0]:
            raise ValueError(f"{masks.shape[0]} masks but {classes.shape[0]} classes")
        void = np.zeros(masks.shape[1], dtype=bool) if self.void is None else np.asarray(self.void, dtype=bool)
        if void.shape != (masks.shape[1],):
            raise ValueError(f"void flags must have length K={masks.shape[1]}")
        if masks.shape[0] and not masks.any(axis=1).all():
            raise ValueError("every ground-truth mask must be nonempty")
        coverage = masks.sum(axis=0)
        if np.any(coverage[~void] != 1):
            raise ValueError("masks must assign every non-void point to exactly one group")
        if np.any(coverage[void] != 0):
            raise ValueError("void points cannot belong to a group")
        self.masks = masks
        self.classes = classes
        self.void = void
        return self

    @property
    def M(self) -> int:
        return int(self.masks.shape[0])

    @property
    def K(self) -> int:
        return int(self.masks.shape[1])

    def group_of_point(self) -> np.ndarray:
        """Group index per point, -1 for void points."""
        labels = np.full(self.K, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.masks)
        labels[cols] = rows
        return labels

    def semantic_of_point(self) -> np.ndarray:
        """Class ID per point, 0 for void points."""
        labels = self.group_of_point()
        out = np.zeros(self.K, dtype=np.int64)
        out[labels >= 0] = self.classes[labels[labels >= 0]]
        return out

    def check_taxonomy(self, taxonomy: ClassTaxonomy) -> None:
        unknown = set(self.classes.tolist()) - set(taxonomy.class_names)
        if unknown:
            raise ValueError(f"ground truth uses classes outside the taxonomy: {sorted(unknown)}")
        stuff = [c for c in self.classes.tolist() if taxonomy.is_stuff(c)]
        if len(stuff) != len(set(stuff)):
            raise ValueError("each stuff class may own at most one group")

    def thing_indices(self, taxonomy: ClassTaxonomy) -> List[int]:
        return [j for j, c in enumerate(self.classes.tolist()) if taxonomy.is_thing(c)]

    def stuff_indices(self, taxonomy: ClassTaxonomy) -> List[int]:
        return [j for j, c in enumerate(self.classes.tolist()) if taxonomy.is_stuff(c)]

    def canonical(self) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
        """Order-free description: sorted (class, member points) pairs."""
        groups = [(int(c), tuple(np.flatnonzero(m).tolist())) for c, m in zip(self.classes, self.masks)]
        return tuple(sorted(groups, key=lambda g: (g[1][0], g[0])))

    def same_partition(self, other: "GroundTruth") -> bool:
        return (
            self.K == other.K
            and np.array_equal(self.void, other.void)
            and self.canonical() == other.canonical()
        )

    def subset(self, keep: np.ndarray) -> "GroundTruth":
        """Restrict to the kept points, dropping groups that lose all their points."""
        masks = self.masks[:, keep]
        alive = masks.any(axis=1)
        return GroundTruth(masks=masks[alive], classes=self.classes[alive], void=self.void[keep])

    @classmethod
    def from_group_labels(cls, labels: np.ndarray, classes: np.ndarray) -> "GroundTruth":
        """Build from per-point group indices (-1 = void) and per-group classes."""
        labels = np.asarray(labels, dtype=np.int64)
        classes = np.asarray(classes, dtype=np.int64)
        masks = labels[None, :] == np.arange(classes.shape[0])[:, None]
        return cls(masks=masks, classes=classes, void=labels < 0)


# ========== Scene Configuration ==========

class ClassGeometry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    length: float = Field(..., gt=0, description="Box extent along the heading (m)")
    width: float = Field(..., gt=0, description="Box extent across the heading (m)")
    height: float = Field(..., gt=0, description="Box height (m)")
    points_min: int = Field(..., ge=1)
    points_max: int = Field(..., ge=1)
    intensity: float = Field(0.5, ge=0, le=1, description="Mean return intensity")

    @model_validator(mode="after")
    def check_range(self) -> "ClassGeometry":
        if self.points_min > self.points_max:
            raise ValueError("points_min must not exceed points_max")
        return self


class StuffBand(BaseModel):
    """A strip of background running along x, at a fixed ground height."""

    model_config = ConfigDict(extra="forbid")

    class_id: int
    y_min: float
    y_max: float
    height: float = 0.0
    intensity: float = Field(0.2, ge=0, le=1)

    @model_validator(mode="after")
    def check_range(self) -> "StuffBand":
        if self.y_min >= self.y_max:
            raise ValueError(f"band for class {self.class_id} has empty y range")
        return self


class StuffLayout(BaseModel):
    model_config = ConfigDict(extra="forbid")

    extent_x: float = Field(40.0, gt=0, description="Ground length along x (m), centred on 0")
    bands: List[StuffBand]
    height_noise: float = Field(0.02, ge=0)


class SceneConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    points_min: int = Field(512, ge=1)
    points_max: int = Field(512, ge=1)
    instances_min: int = Field(0, ge=0)
    instances_max: int = Field(8, ge=0)
    min_stuff_points: int = Field(32, ge=1)
    min_gap: float = Field(1.0, ge=0, description="Minimum footprint gap between instances (m)")
    max_retries: int = Field(50, ge=1, description="Placement attempts per instance")
    class_weights: Dict[int, float] = Field(default_factory=dict, description="Thing class sampling weights")
    geometry: Dict[int, ClassGeometry]
    layout: StuffLayout

    @model_validator(mode="after")
    def check_ranges(self) -> "SceneConfig":
        if self.points_min > self.points_max:
            raise ValueError("points_min must not exceed points_max")
        if self.instances_min > self.instances_max:
            raise ValueError("instances_min must not exceed instances_max")
        if self.instances_max and not self.geometry:
            raise ValueError("geometry is required when instances may be generated")
        if any(w < 0 for w in self.class_weights.values()):
            raise ValueError("class weights must be nonnegative")
        worst = self.instances_max * max((g.points_max for g in self.geometry.values()), default=0)
        if worst + self.min_stuff_points > self.points_min:
            raise ValueError(
                f"instances may use {worst} points, leaving fewer than {self.min_stuff_points} "
                f"stuff points out of {self.points_min}"
            )
        return self
