import logging
import threading
from abc import abstractmethod
from numbers import Number
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .config import DEFAULT_DTYPE
from .errors import ContractError, DimensionError
from .utils import unbroadcast

logger = logging.getLogger(__name__)

_local = threading.local()


def current_tape() -> Optional["Tape"]:
    stack = getattr(_local, "tapes", None)
    return stack[-1] if stack else None


class Tape:
    """
    Ordered record of differentiable op applications.

    Ops are recorded while the tape is active (``with Tape() as tape:``) and at
    least one input requires a gradient. A tape belongs to the thread that
    opened it.
    """

    def __init__(self):
        self.records: List["Function"] = []

    def __enter__(self) -> "Tape":
        if not hasattr(_local, "tapes"):
            _local.tapes = []
        _local.tapes.append(self)
        return self

    def __exit__(self, *exc_info) -> None:
        _local.tapes.pop()

    def __len__(self) -> int:
        return len(self.records)

    def record(self, function: "Function") -> None:
        self.records.append(function)

    def backward(self, loss: "Tensor") -> None:
        """
        Propagate d(loss)/d(.) to every tensor on the tape.

        Recording order is a topological order, so replaying it reversed visits
        every op after all of its consumers. Gradients are accumulated, never
        overwritten: a leaf used k times receives the sum of its k path gradients.
        """
        if loss.size != 1:
            raise ContractError(f"backward() needs a scalar loss, got shape {loss.shape}")
        if not loss.requires_grad:
            logger.debug("backward() called on a loss without history")
            return
        loss.accumulate_grad(np.ones_like(loss.values))
        for function in reversed(self.records):
            out_grad = function.output.grad
            if out_grad is None:
                continue
            grads = function.backward(out_grad)
            if not isinstance(grads, tuple):
                grads = (grads,)
            for tensor, grad in zip(function.inputs, grads):
                if grad is not None and tensor.requires_grad:
                    tensor.accumulate_grad(grad)


class Function:
    """
    Base class for differentiable primitives.

    ``forward`` receives the raw arrays of the inputs, ``backward`` receives the
    gradient w.r.t. the output and returns one gradient (or None) per input.
    """

    def __init__(self, *inputs: "Tensor"):
        self.inputs = inputs
        self.output: Optional["Tensor"] = None

    @abstractmethod
    def forward(self, *arrays: NDArray, **kwargs: Any) -> NDArray:
        raise NotImplementedError()

    @abstractmethod
    def backward(self, grad: NDArray) -> Union[NDArray, Tuple[Optional[NDArray], ...]]:
        raise NotImplementedError()

    @classmethod
    def apply(cls, *inputs: "Tensor", **kwargs: Any) -> "Tensor":
        function = cls(*inputs)
        out = function.forward(*(t.values for t in inputs), **kwargs)
        tape = current_tape()
        requires_grad = tape is not None and any(t.requires_grad for t in inputs)
        result = Tensor(out, requires_grad=requires_grad)
        if requires_grad:
            function.output = result
            tape.record(function)
        return result


class Tensor:
    """
    Dense array with optional gradient tracking.

    Images, maps and latents are 4-D (batch, channels, height, width); losses
    are 0-d. Floating arrays keep their precision (float32 for training,
    float64 under grad_check), anything else is cast to float32.
    """

    # numpy defers binary operators with a Tensor operand to the Tensor methods
    __array_ufunc__ = None

    def __init__(self, values: Union[NDArray, Number, Sequence], requires_grad: bool = False,
                 name: Optional[str] = None):
        array = np.asarray(values)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(DEFAULT_DTYPE)
        self.values: NDArray = array
        self.requires_grad = requires_grad
        self.grad: Optional[NDArray] = None
        self.name = name

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{label})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def dtype(self):
        return self.values.dtype

    def numpy(self) -> NDArray:
        return self.values

    def item(self) -> float:
        return float(self.values.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.values)

    def accumulate_grad(self, grad: NDArray) -> None:
        grad = np.asarray(grad, dtype=self.values.dtype)
        if grad.shape != self.shape:
            raise DimensionError(f"gradient shape {grad.shape} does not match tensor shape {self.shape}")
        if self.grad is None:
            self.grad = grad.copy()
        else:
            self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def _lift(self, other: Union["Tensor", NDArray]) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=self.dtype))

    def __add__(self, other):
        if isinstance(other, Number):
            return ScalarAdd.apply(self, scalar=other)
        return Add.apply(self, self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Number):
            return ScalarAdd.apply(self, scalar=-other)
        return Sub.apply(self, self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return ScalarMul.apply(self, scalar=other)
        return Mul.apply(self, self._lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            raise ContractError("only division by a scalar is supported")
        return ScalarMul.apply(self, scalar=1.0 / other)

    def __neg__(self):
        return ScalarMul.apply(self, scalar=-1.0)

    def square(self) -> "Tensor":
        return Square.apply(self)

    def abs(self) -> "Tensor":
        return Abs.apply(self)

    def sum(self) -> "Tensor":
        return Sum.apply(self)

    def mean(self) -> "Tensor":
        return Mean.apply(self)


class Parameter(Tensor):
    """A trainable leaf tensor with a stable name."""

    def __init__(self, values: NDArray, name: str):
        super().__init__(values, requires_grad=True, name=name)


class Add(Function):
    def forward(self, a, b):
        return a + b

    def backward(self, grad):
        a, b = self.inputs
        return unbroadcast(grad, a.shape), unbroadcast(grad, b.shape)


class Sub(Function):
    def forward(self, a, b):
        return a - b

    def backward(self, grad):
        a, b = self.inputs
        return unbroadcast(grad, a.shape), unbroadcast(-grad, b.shape)


class Mul(Function):
    def forward(self, a, b):
        return a * b

    def backward(self, grad):
        a, b = self.inputs
        return unbroadcast(grad * b.values, a.shape), unbroadcast(grad * a.values, b.shape)


class ScalarAdd(Function):
    def forward(self, a, scalar: float):
        return a + scalar

    def backward(self, grad):
        return grad


class ScalarMul(Function):
    def forward(self, a, scalar: float):
        self.scalar = scalar
        return a * scalar

    def backward(self, grad):
        return grad * self.scalar


class Square(Function):
    def forward(self, a):
        return a * a

    def backward(self, grad):
        return 2 * grad * self.inputs[0].values


class Abs(Function):
    def forward(self, a):
        return np.abs(a)

    def backward(self, grad):
        return grad * np.sign(self.inputs[0].values)


class Sum(Function):
    def forward(self, a):
        return np.sum(a)

    def backward(self, grad):
        return np.broadcast_to(grad, self.inputs[0].shape)


class Mean(Function):
    def forward(self, a):
        return np.mean(a)

    def backward(self, grad):
        a = self.inputs[0]
        return np.broadcast_to(grad / a.size, a.shape)
