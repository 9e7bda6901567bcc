from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np
from numpy.typing import NDArray

from .config import BATCHNORM_EPS, BATCHNORM_MOMENTUM


class Mode(Enum):
    train = "train"
    eval = "eval"


@dataclass
class PoolingIndices:
    """Argmax offsets of a 2x2/stride-2 max pooling.

    Offsets are row-major inside the window: 0 top-left, 1 top-right,
    2 bottom-left, 3 bottom-right.
    """
    argmax: NDArray
    input_shape: Tuple[int, int, int, int]

    @property
    def pooled_shape(self) -> Tuple[int, int, int, int]:
        b, c, h, w = self.input_shape
        return b, c, h // 2, w // 2


@dataclass
class BatchNormState:
    running_mean: NDArray
    running_var: NDArray
    momentum: float = BATCHNORM_MOMENTUM
    eps: float = BATCHNORM_EPS

    @classmethod
    def create(cls, channels: int, dtype=np.float32) -> "BatchNormState":
        return cls(running_mean=np.zeros(channels, dtype=dtype),
                   running_var=np.ones(channels, dtype=dtype))


@dataclass
class AdamState:
    m: Dict[str, NDArray] = field(default_factory=dict)
    v: Dict[str, NDArray] = field(default_factory=dict)
    step: int = 0
