from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from autodiff import LayerNorm, Linear, Module, Tensor
from autodiff.layers import uniform_init
from utils.exceptions import CapacityError, DimensionError


# ========== Classifier Bank ==========

class ClassifierBank(Module):
    """
    N learnable point-level classifiers (theta, N×C) and the semantic head
    (psi, one C-vector per class, T×C). The last ``n_stuff`` classifier slots
    are reserved for the stuff classes.
    """

    def __init__(
        self,
        n_classifiers: int,
        channels: int,
        n_classes: int,
        n_stuff: int = 0,
        rng: Optional[np.random.Generator] = None,
    ):
        if n_classifiers <= n_stuff:
            raise CapacityError(
                f"{n_classifiers} classifiers cannot cover {n_stuff} reserved stuff slots plus things"
            )
        rng = rng if rng is not None else np.random.default_rng(0)
        self.theta = uniform_init(rng, channels, (n_classifiers, channels), "theta")
        self.psi = uniform_init(rng, channels, (n_classes, channels), "psi")
        self.n_stuff = n_stuff

    @property
    def N(self) -> int:
        return self.theta.shape[0]

    @property
    def C(self) -> int:
        return self.theta.shape[1]

    @property
    def T(self) -> int:
        return self.psi.shape[0]

    def reserved_slots(self) -> range:
        return range(self.N - self.n_stuff, self.N)


# ========== Refinement Stage ==========

class RefineStageParams(Module):
    """Momentum gate (phi1), feature projection (phi2) and H-head self-attention over classifiers."""

    def __init__(self, channels: int, heads: int, rng: Optional[np.random.Generator] = None):
        if heads < 1 or channels % heads:
            raise DimensionError(f"{heads} heads do not divide {channels} channels")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.heads = heads
        self.phi1 = Linear(channels, channels, rng)
        self.phi2 = Linear(channels, channels, rng)
        self.norm = LayerNorm(channels)
        self.query = Linear(channels, channels, rng)
        self.key = Linear(channels, channels, rng)
        self.value = Linear(channels, channels, rng)
        self.out = Linear(channels, channels, rng)

    @property
    def C(self) -> int:
        return self.phi1.weight.shape[0]


# ========== Stage Output ==========

class StageOutput(BaseModel):
    """Scores of one decoder stage; logits are kept for the log-space losses."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grouping_logits: Tensor
    grouping_scores: Tensor
    semantic_logits: Tensor
    semantic_scores: Tensor
    refined_theta: Tensor

    @property
    def N(self) -> int:
        return self.grouping_scores.shape[0]

    @property
    def K(self) -> int:
        return self.grouping_scores.shape[1]

    @property
    def T(self) -> int:
        return self.semantic_scores.shape[1]
