from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError


def unbroadcast(grad: NDArray, to_shape: Tuple[int, ...]) -> NDArray:
    """
    Sum out broadcast dimensions so that grad matches to_shape.
    """
    if grad.shape == to_shape:
        return grad
    while grad.ndim > len(to_shape):
        grad = grad.sum(axis=0)
    for dim, size in enumerate(to_shape):
        if size == 1 and grad.shape[dim] != 1:
            grad = grad.sum(axis=dim, keepdims=True)
    return grad


def check_4d(array: NDArray, what: str) -> None:
    if array.ndim != 4:
        raise DimensionError(f"{what} must be 4-D (batch, channels, height, width), got shape {array.shape}")


def conv_output_size(size: int, kernel: int, stride: int, pad: int) -> int:
    return (size + 2 * pad - kernel) // stride + 1


def im2col(x: NDArray, kh: int, kw: int, stride: int, out_hw: Optional[Tuple[int, int]] = None) -> NDArray:
    """
    Contiguous im2col buffer of an already padded (B, C, H, W) array.

    Args:
        out_hw: keep only the first (Ho, Wo) window positions

    Returns:
        (B * Ho * Wo, C * kh * kw) array, rows in (b, i, j) order and columns in (c, ki, kj) order.
    """
    windows = np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    if out_hw is not None:
        windows = windows[:, :, :out_hw[0], :out_hw[1]]
    b, c, ho, wo = windows.shape[:4]
    return np.ascontiguousarray(windows.transpose(0, 2, 3, 1, 4, 5)).reshape(b * ho * wo, c * kh * kw)


def col2im(cols: NDArray, out: NDArray, kh: int, kw: int, stride: int, out_hw: Tuple[int, int]) -> NDArray:
    """
    Inverse scatter of im2col: add the rows of cols into out (B, C, H, W) with kh * kw strided slice-adds.
    """
    b, c = out.shape[:2]
    ho, wo = out_hw
    blocks = cols.reshape(b, ho, wo, c, kh, kw).transpose(0, 3, 4, 5, 1, 2)
    for i in range(kh):
        for j in range(kw):
            out[:, :, i:i + stride * ho:stride, j:j + stride * wo:stride] += blocks[:, :, i, j]
    return out


def to_windows(x: NDArray) -> NDArray:
    """(B, C, H, W) -> (B, C, H/2, W/2, 4) with row-major 2x2 window order."""
    b, c, h, w = x.shape
    return x.reshape(b, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(b, c, h // 2, w // 2, 4)


def from_windows(windows: NDArray) -> NDArray:
    """Inverse of to_windows."""
    b, c, ho, wo, _ = windows.shape
    return windows.reshape(b, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(b, c, ho * 2, wo * 2)
