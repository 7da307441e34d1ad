from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cutmix.models.model import MixPolicy
from matching.models.model import LossWeights


# ========== Run Sections ==========

class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    channels: int = Field(32, ge=1, description="Point feature width C")
    classifiers: int = Field(16, ge=1, description="Number of classifiers N")
    stages: int = Field(3, ge=1, description="Refinement stages S")
    heads: int = Field(4, ge=1, description="Self-attention heads H")
    hidden: int = Field(32, ge=1, description="Encoder hidden width")
    neighbors: int = Field(16, ge=0, description="Encoder neighbourhood size k")
    refine: bool = Field(True, description="Off: every stage repeats the unrefined scores")

    @model_validator(mode="after")
    def check_heads(self) -> "ModelSection":
        if self.channels % self.heads:
            raise ValueError(f"{self.heads} heads do not divide {self.channels} channels")
        return self


class OptimSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lr: float = Field(0.002, gt=0)
    weight_decay: float = Field(0.05, ge=0)
    epochs: int = Field(6, ge=0)
    batch_size: int = Field(4, ge=1)
    lr_milestone: int = Field(4, ge=0, description="Epoch from which the learning rate is decayed")
    lr_decay: float = Field(0.1, gt=0)
    grad_clip: float = Field(10.0, ge=0, description="Global gradient norm limit; 0 disables clipping")


class DataSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train_scenes: int = Field(2000, ge=0)
    val_scenes: int = Field(200, ge=0)
    scene_config: Optional[str] = Field(None, description="Scene config TOML; the toy layout when unset")


class AugmentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    flip: bool = True
    rotate: bool = True
    scale: bool = True
    scale_range: List[float] = Field(default_factory=lambda: [0.95, 1.05])

    @field_validator("scale_range")
    def check_range(cls, v: List[float]) -> List[float]:
        if len(v) != 2 or not 0 < v[0] <= v[1]:
            raise ValueError(f"scale_range must be [low, high] with 0 < low <= high, got {v}")
        return v


class CutMixSection(MixPolicy):
    enabled: bool = True

    def policy(self) -> MixPolicy:
        return MixPolicy.model_validate(self.model_dump(exclude={"enabled"}))


# ========== Run Config ==========

class RunConfig(BaseModel):
    """Everything one train/eval/preview/export run needs; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    profile: str = "toy"
    seed: int = 0
    taxonomy: str = Field("toy", description="Preset name or taxonomy TOML path")
    out_dir: str = "runs"
    model: ModelSection = Field(default_factory=ModelSection)
    loss: LossWeights = Field(default_factory=LossWeights)
    optim: OptimSection = Field(default_factory=OptimSection)
    data: DataSection = Field(default_factory=DataSection)
    augment: AugmentSection = Field(default_factory=AugmentSection)
    cutmix: CutMixSection = Field(default_factory=CutMixSection)


# ========== Sweep ==========

class SweepSection(BaseModel):
    """One run per value of a single dotted run-config key, e.g. ``model.classifiers``."""

    model_config = ConfigDict(extra="forbid")

    key: str = Field(..., description="section.field of the run config to vary")
    values: List[Union[int, float, bool, str]] = Field(..., min_length=1)

    @field_validator("key")
    def check_key(cls, v: str) -> str:
        parts = v.split(".")
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"sweep key must look like 'section.field', got '{v}'")
        return v

    @property
    def section(self) -> str:
        return self.key.split(".")[0]

    @property
    def field(self) -> str:
        return self.key.split(".")[1]
