from .tensor import Tensor, ComputationTape, tape, no_grad, current_tape, is_grad_enabled
from .layers import Module, Linear, LayerNorm
from .optim import AdamW, StepLR, clip_grad_norm

__all__ = [
    "Tensor",
    "ComputationTape",
    "tape",
    "no_grad",
    "current_tape",
    "is_grad_enabled",
    "Module",
    "Linear",
    "LayerNorm",
    "AdamW",
    "StepLR",
    "clip_grad_norm",
]
