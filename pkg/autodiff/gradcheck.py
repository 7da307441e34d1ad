"""Central finite-difference oracle for the analytic gradients."""
from typing import Callable, Dict, Sequence

import numpy as np

from .tensor import Tensor, no_grad, tape


def numerical_gradient(fn: Callable[[], Tensor], param: Tensor, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros(param.values.size)
    flat = param.values.reshape(-1)
    with no_grad():
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            plus = fn().item()
            flat[i] = original - h
            minus = fn().item()
            flat[i] = original
            grad[i] = (plus - minus) / (2.0 * h)
    return grad.reshape(param.values.shape)


def analytic_gradients(fn: Callable[[], Tensor], params: Sequence[Tensor]) -> Dict[int, np.ndarray]:
    for p in params:
        p.grad = None
    with tape():
        loss = fn()
        loss.backward()
    return {id(p): (np.zeros_like(p.values) if p.grad is None else p.grad.copy()) for p in params}


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def max_gradient_error(fn: Callable[[], Tensor], params: Sequence[Tensor], h: float = 1e-5) -> float:
    """Largest relative error between analytic and central-difference gradients over ``params``."""
    analytic = analytic_gradients(fn, params)
    return max(relative_error(analytic[id(p)], numerical_gradient(fn, p, h)) for p in params)
