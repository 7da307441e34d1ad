"""
Mask and classification losses.

Every loss takes logits and works in log-sigmoid space. The ``pairwise_*``
helpers evaluate the same formulas in plain numpy for the matching cost,
which needs no gradient.
"""
from typing import Optional, Union

import numpy as np

from autodiff import Tensor
from autodiff import functional as F
from autodiff.functional import _stable_sigmoid
from utils.exceptions import ContractError, DimensionError

DICE_EPS = 1e-6

ArrayOrTensor = Union[np.ndarray, Tensor]


def _target(g: ArrayOrTensor, like: Tensor, what: str) -> np.ndarray:
    values = g.values if isinstance(g, Tensor) else np.asarray(g, dtype=np.float64)
    if values.shape != like.shape:
        raise DimensionError(f"{what}: prediction {like.shape} and target {values.shape} differ")
    return values


# ==================== Differentiable losses ====================

def dice_loss(p: Tensor, g: ArrayOrTensor, eps: float = DICE_EPS) -> Tensor:
    """1 - (2·Σp·g + eps) / (Σp + Σg + eps), reduced over the last axis."""
    target = _target(g, p, "dice_loss")
    overlap = (p * target).sum(axis=-1)
    total = p.sum(axis=-1) + target.sum(axis=-1)
    return 1.0 - (overlap * 2.0 + eps) / (total + eps)


def mask_bce_loss(logits: Tensor, g: ArrayOrTensor) -> Tensor:
    """Mean point-wise binary cross entropy from logits, reduced over the last axis."""
    target = _target(g, logits, "mask_bce_loss")
    return (F.softplus(logits) - logits * target).mean(axis=-1)


def focal_terms(logits: Tensor, targets: np.ndarray, alpha: float = 0.25, gamma: float = 2.0) -> Tensor:
    """Sigmoid focal loss per entry, for a 0/1 target array of the same shape."""
    targets = _target(targets, logits, "focal_loss")
    p = F.sigmoid(logits)
    positive = ((1.0 - p) ** gamma) * F.softplus(-logits) * alpha
    negative = (p ** gamma) * F.softplus(logits) * (1.0 - alpha)
    return positive * targets + negative * (1.0 - targets)


def focal_loss(
    logits: Tensor,
    c: Optional[int],
    alpha: float = 0.25,
    gamma: float = 2.0,
) -> Tensor:
    """
    Focal loss of one classifier's T class logits, summed over classes.
    ``c`` is the 1-based target class; ``None`` treats every class as negative.
    """
    if logits.ndim != 1:
        raise DimensionError(f"focal_loss expects a vector of class logits, got {logits.shape}")
    T = logits.shape[0]
    targets = np.zeros(T)
    if c is not None:
        if not 1 <= c <= T:
            raise ContractError(f"class ID {c} outside 1..{T}")
        targets[c - 1] = 1.0
    return focal_terms(logits, targets, alpha, gamma).sum()


# ==================== Pairwise costs (numpy) ====================

def _softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def pairwise_dice(probs: np.ndarray, masks: np.ndarray, eps: float = DICE_EPS) -> np.ndarray:
    """Dice between every mask (M×K) and every prediction (N×K), shape M×N."""
    overlap = masks @ probs.T
    total = masks.sum(axis=1)[:, None] + probs.sum(axis=1)[None, :]
    return 1.0 - (2.0 * overlap + eps) / (total + eps)


def pairwise_bce(logits: np.ndarray, masks: np.ndarray) -> np.ndarray:
    K = logits.shape[1]
    cost = _softplus(-logits) @ masks.T + _softplus(logits) @ (1.0 - masks).T
    return (cost / K).T


def pairwise_focal(
    logits: np.ndarray,
    classes: np.ndarray,
    alpha: float = 0.25,
    gamma: float = 2.0,
) -> np.ndarray:
    """Focal loss of every prediction (N×T logits) against every 1-based target class, shape M×N."""
    p = _stable_sigmoid(logits)
    positive = alpha * (1.0 - p) ** gamma * _softplus(-logits)
    negative = (1.0 - alpha) * p ** gamma * _softplus(logits)
    cols = np.asarray(classes, dtype=np.int64) - 1
    cost = negative.sum(axis=1)[:, None] + positive[:, cols] - negative[:, cols]
    return cost.T
