"""
Dense float64 tensors with tape-based reverse-mode differentiation.

Every differentiable operation creates its output through ``Tensor._from_op``,
which records the output node on the thread's active ``ComputationTape``.
Nodes are appended in creation order, so the tape is topologically sorted by
construction and ``backward`` is a single reverse sweep over it.
"""
import logging
import threading
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import ContractError, DimensionError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence, float, int]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_EXP_MAX = 700.0

_state = threading.local()


class ComputationTape:
    """Ordered record of the operations producing gradient-tracked tensors."""

    def __init__(self) -> None:
        self.nodes: List["Tensor"] = []

    def record(self, node: "Tensor") -> None:
        node._tape = self
        node._tape_index = len(self.nodes)
        self.nodes.append(node)

    def clear(self) -> None:
        for node in self.nodes:
            node._tape = None
            node._backward = None
            node._parents = ()
        self.nodes = []

    def __len__(self) -> int:
        return len(self.nodes)

    def backward(self, loss: "Tensor", retain_graph: bool = False) -> None:
        if loss.values.size != 1:
            raise ContractError(f"backward expects a scalar loss, got shape {loss.shape}")
        if loss._tape is not self:
            raise ContractError("loss was not produced on this tape")

        pending = {id(loss): np.ones_like(loss.values)}
        for node in reversed(self.nodes[: loss._tape_index + 1]):
            grad_out = pending.pop(id(node), None)
            if grad_out is None:
                continue
            parent_grads = node._backward(grad_out)
            for parent, grad in zip(node._parents, parent_grads):
                if grad is None or not parent.requires_grad:
                    continue
                grad = _unbroadcast(grad, parent.values.shape)
                if parent._tape is None:
                    # leaf: gradients accumulate across backward calls
                    parent.grad = grad.copy() if parent.grad is None else parent.grad + grad
                else:
                    key = id(parent)
                    pending[key] = grad if key not in pending else pending[key] + grad

        if not retain_graph:
            self.clear()


def current_tape() -> ComputationTape:
    tape = getattr(_state, "tape", None)
    if tape is None:
        tape = ComputationTape()
        _state.tape = tape
    return tape


@contextmanager
def tape(active: Optional[ComputationTape] = None) -> Iterator[ComputationTape]:
    """Make ``active`` (or a fresh tape) the recording tape for this thread."""
    previous = getattr(_state, "tape", None)
    active = active or ComputationTape()
    _state.tape = active
    try:
        yield active
    finally:
        _state.tape = previous


@contextmanager
def no_grad() -> Iterator[None]:
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_finite(values: np.ndarray, op: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ContractError(f"{op} produced non-finite values")


class Tensor:
    """A dense row-major float64 array that can take part in differentiation."""

    def __init__(self, values: ArrayLike, requires_grad: bool = False, name: Optional[str] = None):
        arr = np.array(values, dtype=np.float64, copy=True)
        _check_finite(arr, "Tensor construction")
        self.values = np.ascontiguousarray(arr)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None
        self._tape: Optional[ComputationTape] = None
        self._tape_index = -1

    @classmethod
    def _from_op(
        cls,
        values: np.ndarray,
        parents: Tuple["Tensor", ...],
        backward: BackwardFn,
        op: str,
    ) -> "Tensor":
        _check_finite(values, op)
        out = cls.__new__(cls)
        out.values = np.ascontiguousarray(values, dtype=np.float64)
        out.grad = None
        out.name = None
        out._parents = ()
        out._backward = None
        out._tape = None
        out._tape_index = -1
        out.requires_grad = is_grad_enabled() and any(p.requires_grad for p in parents)
        if out.requires_grad:
            out._parents = parents
            out._backward = backward
            current_tape().record(out)
        return out

    # ==================== Basics ====================

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.values.shape)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def item(self) -> float:
        if self.values.size != 1:
            raise ContractError(f"item() needs a single value, got shape {self.shape}")
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.values)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, retain_graph: bool = False) -> None:
        if self._tape is None:
            raise ContractError("backward called on a tensor that was not produced by taped operations")
        self._tape.backward(self, retain_graph=retain_graph)

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # ==================== Elementwise arithmetic ====================

    def __add__(self, other: Union["Tensor", float]) -> "Tensor":
        other = _as_tensor(other)
        _check_broadcast(self, other, "add")
        return Tensor._from_op(
            self.values + other.values, (self, other), lambda g: (g, g), "add"
        )

    __radd__ = __add__

    def __sub__(self, other: Union["Tensor", float]) -> "Tensor":
        other = _as_tensor(other)
        _check_broadcast(self, other, "sub")
        return Tensor._from_op(
            self.values - other.values, (self, other), lambda g: (g, -g), "sub"
        )

    def __rsub__(self, other: float) -> "Tensor":
        return _as_tensor(other) - self

    def __mul__(self, other: Union["Tensor", float]) -> "Tensor":
        other = _as_tensor(other)
        _check_broadcast(self, other, "mul")
        a, b = self.values, other.values
        return Tensor._from_op(a * b, (self, other), lambda g: (g * b, g * a), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other: Union["Tensor", float]) -> "Tensor":
        other = _as_tensor(other)
        _check_broadcast(self, other, "div")
        a, b = self.values, other.values
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a / b
        return Tensor._from_op(
            out, (self, other), lambda g: (g / b, -g * a / (b * b)), "div"
        )

    def __rtruediv__(self, other: float) -> "Tensor":
        return _as_tensor(other) / self

    def __neg__(self) -> "Tensor":
        return Tensor._from_op(-self.values, (self,), lambda g: (-g,), "neg")

    def __pow__(self, exponent: float) -> "Tensor":
        if isinstance(exponent, Tensor):
            raise ContractError("pow supports scalar exponents only")
        x = self.values
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.power(x, exponent)
        return Tensor._from_op(
            out, (self,), lambda g: (g * exponent * np.power(x, exponent - 1),), f"pow{exponent}"
        )

    def __matmul__(self, other: "Tensor") -> "Tensor":
        if self.ndim != 2 or other.ndim != 2 or self.shape[1] != other.shape[0]:
            raise DimensionError(f"matmul shape mismatch: {self.shape} x {other.shape}")
        a, b = self.values, other.values
        return Tensor._from_op(a @ b, (self, other), lambda g: (g @ b.T, a.T @ g), "matmul")

    # ==================== Shape & reductions ====================

    @property
    def T(self) -> "Tensor":
        if self.ndim != 2:
            raise DimensionError(f"transpose expects a matrix, got shape {self.shape}")
        return Tensor._from_op(self.values.T.copy(), (self,), lambda g: (g.T,), "transpose")

    def __getitem__(self, index) -> "Tensor":
        if isinstance(index, Tensor):
            raise ContractError("index with integer arrays or slices, not tensors")
        shape = self.values.shape
        parts = index if isinstance(index, tuple) else (index,)
        basic = all(isinstance(p, (slice, int, type(None), type(Ellipsis))) for p in parts)

        def backward(g: np.ndarray) -> Tuple[np.ndarray]:
            full = np.zeros(shape)
            if basic:
                full[index] += g
            else:
                # repeated indices must accumulate
                np.add.at(full, index, g)
            return (full,)

        return Tensor._from_op(np.array(self.values[index]), (self,), backward, "slice")

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        shape = self.values.shape

        def backward(g: np.ndarray) -> Tuple[np.ndarray]:
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape).copy(),)

        return Tensor._from_op(
            np.asarray(self.values.sum(axis=axis, keepdims=keepdims)), (self,), backward, "sum"
        )

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        count = self.values.size if axis is None else self.values.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def exp(self) -> "Tensor":
        clipped = np.minimum(self.values, _EXP_MAX)
        out = np.exp(clipped)
        live = self.values < _EXP_MAX
        return Tensor._from_op(out, (self,), lambda g: (g * out * live,), "exp")

    def log(self) -> "Tensor":
        x = self.values
        if np.any(x <= 0):
            raise ContractError("log requires strictly positive input")
        return Tensor._from_op(np.log(x), (self,), lambda g: (g / x,), "log")


def _as_tensor(value: Union[Tensor, float, int, np.ndarray]) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _check_broadcast(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.values.shape, b.values.shape)
    except ValueError:
        raise DimensionError(f"{op} shape mismatch: {a.shape} and {b.shape}") from None
