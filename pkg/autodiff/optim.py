"""AdamW with decoupled weight decay, a step learning-rate schedule and gradient clipping."""
import logging
from typing import List, Sequence

import numpy as np

from .tensor import Tensor

logger = logging.getLogger(__name__)


class AdamW:

    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float,
        betas: tuple = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.05,
    ):
        self.params: List[Tensor] = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self._m = [np.zeros_like(p.values) for p in self.params]
        self._v = [np.zeros_like(p.values) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        self.step_count += 1
        bias1 = 1.0 - self.beta1 ** self.step_count
        bias2 = 1.0 - self.beta2 ** self.step_count
        for p, m, v in zip(self.params, self._m, self._v):
            if p.grad is None:
                continue
            g = p.grad
            p.values *= 1.0 - self.lr * self.weight_decay
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.values -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


class StepLR:
    """Multiply the learning rate by ``gamma`` once ``milestone`` epochs have passed."""

    def __init__(self, optimizer: AdamW, milestone: int, gamma: float = 0.1):
        self.optimizer = optimizer
        self.milestone = milestone
        self.gamma = gamma
        self.base_lr = optimizer.lr

    def lr_at(self, epoch: int) -> float:
        return self.base_lr * (self.gamma if epoch >= self.milestone else 1.0)

    def set_epoch(self, epoch: int) -> float:
        lr = self.lr_at(epoch)
        if lr != self.optimizer.lr:
            logger.info(f"Learning rate {self.optimizer.lr:g} -> {lr:g} at epoch {epoch}")
        self.optimizer.lr = lr
        return lr


def clip_grad_norm(params: Sequence[Tensor], max_norm: float) -> float:
    """Rescale gradients in place so their global L2 norm is at most ``max_norm``."""
    grads = [p.grad for p in params if p.grad is not None]
    total = float(np.sqrt(sum(float((g * g).sum()) for g in grads))) if grads else 0.0
    if max_norm > 0 and total > max_norm:
        factor = max_norm / (total + 1e-12)
        for p in params:
            if p.grad is not None:
                p.grad = p.grad * factor
    return total
