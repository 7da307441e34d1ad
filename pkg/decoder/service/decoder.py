"""
Classifier decoder.

Stage 0 scores every point with the unrefined classifiers. Each refinement
stage then pools point features under the previous grouping scores, blends
them into the classifiers through a learned channelwise momentum, lets the
classifiers attend to each other, and rescores.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from autodiff import Tensor
from autodiff import functional as F
from utils.exceptions import DimensionError
from ..models.model import ClassifierBank, RefineStageParams, StageOutput

logger = logging.getLogger(__name__)


def _check_width(a: Tensor, b: Tensor, what: str) -> None:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionError(f"{what}: width mismatch between {a.shape} and {b.shape}")


def grouping_scores(theta: Tensor, features: Tensor) -> Tensor:
    """sigmoid(theta · Fᵀ), shape N×K."""
    _check_width(theta, features, "grouping_scores")
    return F.sigmoid(theta @ features.T)


def semantic_scores(psi: Tensor, theta: Tensor) -> Tensor:
    """sigmoid(theta · psiᵀ), shape N×T."""
    _check_width(theta, psi, "semantic_scores")
    return F.sigmoid(theta @ psi.T)


def score_heads(theta: Tensor, features: Tensor, psi: Tensor) -> StageOutput:
    _check_width(theta, features, "grouping_scores")
    _check_width(theta, psi, "semantic_scores")
    g_logits = theta @ features.T
    s_logits = theta @ psi.T
    return StageOutput(
        grouping_logits=g_logits,
        grouping_scores=F.sigmoid(g_logits),
        semantic_logits=s_logits,
        semantic_scores=F.sigmoid(s_logits),
        refined_theta=theta,
    )


def query_features(g: Tensor, features: Tensor) -> Tensor:
    """Score-weighted feature pooling, (1/K)·g·F."""
    if g.ndim != 2 or features.ndim != 2 or g.shape[1] != features.shape[0]:
        raise DimensionError(f"query_features: scores {g.shape} do not match features {features.shape}")
    return (g @ features) * (1.0 / features.shape[0])


def momentum_update(f_theta: Tensor, theta: Tensor, params: RefineStageParams) -> Tensor:
    """
    m = 1 - sigmoid(phi1(F_theta)) channelwise;
    theta~ = (1 - m)·phi2(F_theta) + m·theta.
    """
    if f_theta.shape != theta.shape:
        raise DimensionError(f"momentum_update: pooled features {f_theta.shape} vs classifiers {theta.shape}")
    keep_new = F.sigmoid(params.phi1(f_theta))
    return keep_new * params.phi2(f_theta) + (1.0 - keep_new) * theta


def attention_heads(theta: Tensor, params: RefineStageParams) -> Tuple[Tensor, List[np.ndarray]]:
    """Multi-head scaled dot-product attention over the classifiers; returns the mixed values and per-head weights."""
    x = params.norm(theta)
    q, k, v = params.query(x), params.key(x), params.value(x)
    width = params.C // params.heads
    scale = 1.0 / np.sqrt(width)
    outputs: List[Tensor] = []
    weights: List[np.ndarray] = []
    for h in range(params.heads):
        cols = (slice(None), slice(h * width, (h + 1) * width))
        attn = F.softmax_rows((q[cols] @ k[cols].T) * scale)
        weights.append(attn.numpy())
        outputs.append(attn @ v[cols])
    return params.out(F.concat(outputs, axis=1)), weights


def classifier_self_attention(theta: Tensor, params: RefineStageParams) -> Tensor:
    """Pre-normalised residual self-attention: theta + MHA(LayerNorm(theta))."""
    if theta.ndim != 2 or theta.shape[1] != params.C:
        raise DimensionError(f"self-attention expects N×{params.C} classifiers, got {theta.shape}")
    mixed, _ = attention_heads(theta, params)
    return theta + mixed


def refine(previous: StageOutput, features: Tensor, psi: Tensor, params: RefineStageParams) -> StageOutput:
    pooled = query_features(previous.grouping_scores, features)
    blended = momentum_update(pooled, previous.refined_theta, params)
    return score_heads(classifier_self_attention(blended, params), features, psi)


def decode(
    features: Tensor,
    bank: ClassifierBank,
    stages: Sequence[RefineStageParams],
    refine_classifiers: bool = True,
    initial: Optional[List[StageOutput]] = None,
) -> List[StageOutput]:
    """
    Run every stage and return the S stage outputs (the last feeds inference).

    With ``refine_classifiers`` off, each stage repeats the unrefined scores.
    When ``initial`` is a list, the stage-0 output is appended to it.
    """
    if not stages:
        raise DimensionError("decode needs at least one refinement stage")
    current = score_heads(bank.theta, features, bank.psi)
    if initial is not None:
        initial.append(current)
    if not refine_classifiers:
        return [current for _ in stages]
    outputs: List[StageOutput] = []
    for params in stages:
        current = refine(current, features, bank.psi, params)
        outputs.append(current)
    return outputs
