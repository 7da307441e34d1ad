"""Parameter containers: the learnable pieces the encoder and decoder are built from."""
import logging
from typing import Dict, Iterator, List, Tuple

import numpy as np

from utils.exceptions import DimensionError
from . import functional as F
from .tensor import Tensor

logger = logging.getLogger(__name__)


def uniform_init(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...], name: str) -> Tensor:
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True, name=name)


class Module:
    """
    Base class that discovers parameters from instance attributes.
    Tensor attributes with ``requires_grad`` are parameters; Module attributes
    and lists of Modules are walked recursively in attribute order.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for attr, value in vars(self).items():
            name = f"{prefix}{attr}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{name}.")
            elif isinstance(value, list):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{index}.")

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def state_dict(self, prefix: str = "") -> Dict[str, np.ndarray]:
        return {name: p.values.copy() for name, p in self.named_parameters(prefix)}

    def load_state_dict(self, state: Dict[str, np.ndarray], prefix: str = "") -> None:
        for name, param in self.named_parameters(prefix):
            if name not in state:
                raise DimensionError(f"checkpoint is missing parameter '{name}'")
            values = state[name]
            if values.shape != param.values.shape:
                raise DimensionError(
                    f"parameter '{name}' has shape {param.shape} but checkpoint holds {values.shape}"
                )
            param.values[...] = values

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()


class Linear(Module):

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        self.weight = uniform_init(rng, in_features, (in_features, out_features), "weight")
        self.bias = uniform_init(rng, in_features, (out_features,), "bias")

    def __call__(self, x: Tensor) -> Tensor:
        return F.linear(x, self.weight, self.bias)


class LayerNorm(Module):

    def __init__(self, width: int, eps: float = 1e-5):
        self.gain = Tensor(np.ones(width), requires_grad=True, name="gain")
        self.bias = Tensor(np.zeros(width), requires_grad=True, name="bias")
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return F.layer_norm(x, self.gain, self.bias, self.eps)
