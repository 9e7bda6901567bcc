import numpy as np
from numpy.typing import NDArray

from tensorcore import ParameterError, Tensor
from tensorcore.config import DEFAULT_DTYPE


def one_hot(labels: NDArray, num_classes: int) -> NDArray:
    """(B, H, W) integer labels -> (B, num_classes, H, W) float one-hot maps."""
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ParameterError(f"labels must lie in [0, {num_classes}), got range "
                             f"[{labels.min()}, {labels.max()}]")
    eye = np.eye(num_classes, dtype=DEFAULT_DTYPE)
    return np.ascontiguousarray(eye[labels].transpose(0, 3, 1, 2))


def labels_from_logits(logits: Tensor) -> NDArray:
    return logits.values.argmax(axis=1).astype(np.uint8)
