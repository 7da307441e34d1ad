from typing import List, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


# ========== Loss Weights ==========

class LossWeights(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(4.0, ge=0, description="Dice weight")
    beta: float = Field(1.0, ge=0, description="Focal classification weight")
    gamma: float = Field(1.0, ge=0, description="Point-wise BCE weight")
    focal_gamma: float = Field(2.0, ge=0, description="Focal focusing exponent")
    focal_alpha: float = Field(0.25, ge=0, le=1, description="Focal positive-class balance")


# ========== Assignment ==========

class Assignment(BaseModel):
    """One-to-one map from ground-truth groups to classifiers; the rest are unmatched."""

    n_classifiers: int = Field(..., ge=0)
    pairs: List[Tuple[int, int]] = Field(default_factory=list, description="(ground truth j, classifier i)")
    unmatched: Set[int] = Field(default_factory=set)

    @model_validator(mode="after")
    def check_one_to_one(self) -> "Assignment":
        gts = [j for j, _ in self.pairs]
        classifiers = [i for _, i in self.pairs]
        if len(set(gts)) != len(gts):
            raise ValueError("a ground truth appears in more than one pair")
        if len(set(classifiers)) != len(classifiers):
            raise ValueError("a classifier appears in more than one pair")
        if set(classifiers) & self.unmatched:
            raise ValueError("a classifier is both matched and unmatched")
        if set(classifiers) | self.unmatched != set(range(self.n_classifiers)):
            raise ValueError(f"pairs and unmatched must cover all {self.n_classifiers} classifiers")
        return self

    @classmethod
    def from_pairs(cls, pairs: List[Tuple[int, int]], n_classifiers: int) -> "Assignment":
        ordered = sorted((int(j), int(i)) for j, i in pairs)
        used = {i for _, i in ordered}
        return cls(
            n_classifiers=n_classifiers,
            pairs=ordered,
            unmatched={i for i in range(n_classifiers) if i not in used},
        )

    def classifier_of(self, j: int) -> int:
        for gt, i in self.pairs:
            if gt == j:
                return i
        raise KeyError(f"ground truth {j} is not matched")
