from typing import Dict, Iterable, List

import numpy as np
from numpy.typing import NDArray

from .config import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from .datatypes import AdamState
from .errors import DimensionError
from .tensor import Parameter


def adam_step(params: Dict[str, NDArray], grads: Dict[str, NDArray], state: AdamState, lr: float,
              beta1: float = ADAM_BETA1, beta2: float = ADAM_BETA2, eps: float = ADAM_EPS) -> Dict[str, NDArray]:
    """
    One bias-corrected Adam update, applied in place to params and state.
    """
    state.step += 1
    bias1 = 1.0 - beta1 ** state.step
    bias2 = 1.0 - beta2 ** state.step
    for name, value in params.items():
        grad = grads[name]
        if grad.shape != value.shape:
            raise DimensionError(f"gradient of '{name}' has shape {grad.shape}, parameter has {value.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(value)
            state.v[name] = np.zeros_like(value)
        m, v = state.m[name], state.v[name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * (grad * grad)
        value -= (lr / bias1) * m / (np.sqrt(v / bias2) + eps)
    return params


class Adam:
    """Adam over a fixed list of Parameters, reading their accumulated .grad."""

    def __init__(self, parameters: Iterable[Parameter], lr: float, beta1: float = ADAM_BETA1,
                 beta2: float = ADAM_BETA2, eps: float = ADAM_EPS):
        self.parameters: List[Parameter] = list(parameters)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.zero_grad()

    def step(self) -> None:
        active = [p for p in self.parameters if p.grad is not None]
        adam_step({p.name: p.values for p in active}, {p.name: p.grad for p in active}, self.state,
                  self.lr, self.beta1, self.beta2, self.eps)
