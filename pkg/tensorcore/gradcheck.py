from typing import Callable, Sequence

import numpy as np

from .config import GRADCHECK_DTYPE, GRADCHECK_EPS
from .errors import ContractError
from .tensor import Tape, Tensor


def grad_check(fn: Callable[[Tensor], Tensor], x: Tensor, eps: float = GRADCHECK_EPS,
               params: Sequence[Tensor] = ()) -> float:
    """
    Compare tape gradients with central finite differences in 64-bit precision.

    x and every tensor in params are promoted to float64 for the duration of the
    check and restored afterwards. fn must be deterministic and return a scalar.

    Returns:
        max over all checked elements of |a - n| / max(|a|, |n|, 1e-8).
    """
    leaves = [x, *[p for p in params if p is not x]]
    saved = [(t.values, t.grad, t.requires_grad) for t in leaves]
    try:
        for t in leaves:
            t.values = np.array(t.values, dtype=GRADCHECK_DTYPE)
            t.grad = None
            t.requires_grad = True
        with Tape() as tape:
            out = fn(x)
        if out.size != 1:
            raise ContractError(f"grad_check needs a scalar-valued function, got shape {out.shape}")
        tape.backward(out)

        worst = 0.0
        for t in leaves:
            analytic = t.grad if t.grad is not None else np.zeros_like(t.values)
            numeric = np.zeros_like(t.values)
            flat = t.values.reshape(-1)
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + eps
                plus = fn(x).item()
                flat[i] = original - eps
                minus = fn(x).item()
                flat[i] = original
                numeric.reshape(-1)[i] = (plus - minus) / (2 * eps)
            scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
            worst = max(worst, float(np.max(np.abs(analytic - numeric) / scale)))
        return worst
    finally:
        for t, (values, grad, requires_grad) in zip(leaves, saved):
            t.values, t.grad, t.requires_grad = values, grad, requires_grad
