"""Differentiable building blocks used by the encoder, decoder and losses."""
from typing import Optional, Sequence, Tuple

import numpy as np

from utils.exceptions import DimensionError
from .tensor import Tensor, _as_tensor


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return a @ b


def transpose(x: Tensor) -> Tensor:
    return x.T


def add(a: Tensor, b: Tensor) -> Tensor:
    return a + b


def sub(a: Tensor, b: Tensor) -> Tensor:
    return a - b


def mul(a: Tensor, b: Tensor) -> Tensor:
    return a * b


def scale(x: Tensor, factor: float) -> Tensor:
    return x * float(factor)


def shift(x: Tensor, offset: float) -> Tensor:
    return x + float(offset)


def power(x: Tensor, exponent: float) -> Tensor:
    return x ** exponent


def exp(x: Tensor) -> Tensor:
    return x.exp()


def log(x: Tensor) -> Tensor:
    return x.log()


def sum_rows(x: Tensor) -> Tensor:
    """Sum across each row (result has one entry per row)."""
    return x.sum(axis=-1)


def sum_cols(x: Tensor) -> Tensor:
    return x.sum(axis=0)


def mean_rows(x: Tensor) -> Tensor:
    return x.mean(axis=-1)


def mean_cols(x: Tensor) -> Tensor:
    return x.mean(axis=0)


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(x: Tensor) -> Tensor:
    s = _stable_sigmoid(x.values)
    return Tensor._from_op(s, (x,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def softplus(x: Tensor) -> Tensor:
    """log(1 + exp(x)) without overflow."""
    v = x.values
    out = np.maximum(v, 0.0) + np.log1p(np.exp(-np.abs(v)))
    s = _stable_sigmoid(v)
    return Tensor._from_op(out, (x,), lambda g: (g * s,), "softplus")


def log_sigmoid(x: Tensor) -> Tensor:
    return -softplus(-x)


def relu(x: Tensor) -> Tensor:
    live = x.values > 0
    return Tensor._from_op(x.values * live, (x,), lambda g: (g * live,), "relu")


def softmax_rows(x: Tensor) -> Tensor:
    """Softmax over the last axis, computed after subtracting the row maximum."""
    shifted = x.values - x.values.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=-1, keepdims=True)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        return (s * (g - (g * s).sum(axis=-1, keepdims=True)),)

    return Tensor._from_op(s, (x,), backward, "softmax")


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise DimensionError("concat needs at least one tensor")
    try:
        out = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        shapes = ", ".join(str(t.shape) for t in tensors)
        raise DimensionError(f"concat shape mismatch along axis {axis}: {shapes}") from None
    bounds = np.cumsum([t.values.shape[axis] for t in tensors])[:-1]

    def backward(g: np.ndarray) -> Tuple[np.ndarray, ...]:
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor._from_op(out, tuple(tensors), backward, "concat")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalise each row to zero mean and unit variance, then apply gain and bias."""
    centered = x - x.mean(axis=-1, keepdims=True)
    variance = (centered * centered).mean(axis=-1, keepdims=True)
    return centered * ((variance + eps) ** -0.5) * gain + bias


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """Affine map ``x @ weight + bias``; weight is stored as (in, out)."""
    if x.shape[-1] != weight.shape[0]:
        raise DimensionError(f"linear input width {x.shape} does not match weight {weight.shape}")
    out = x @ weight
    return out if bias is None else out + bias


def constant(values) -> Tensor:
    return _as_tensor(np.asarray(values, dtype=np.float64))
