"""
Differentiable primitives used by the encoders, decoders, discriminator and losses.

Every public function validates shapes, raises DimensionError/ParameterError
on misuse and returns a Tensor recorded on the active Tape.
"""
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import log_softmax

from .config import LEAKY_SLOPE
from .datatypes import BatchNormState, Mode, PoolingIndices
from .errors import DimensionError, ParameterError
from .tensor import Function, Tensor
from .utils import check_4d, col2im, conv_output_size, from_windows, im2col, to_windows


class Conv2d(Function):
    def forward(self, x, w, b=None, stride=1, pad=0):
        self.stride, self.pad = stride, pad
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
        self.padded_shape = xp.shape
        n = x.shape[0]
        out_ch, _, kh, kw = w.shape
        self.out_hw = (conv_output_size(x.shape[2], kh, stride, pad), conv_output_size(x.shape[3], kw, stride, pad))
        # kept for grad_w
        self.cols = im2col(xp, kh, kw, stride)
        out = self.cols @ w.reshape(out_ch, -1).T
        out = out.reshape(n, self.out_hw[0], self.out_hw[1], out_ch).transpose(0, 3, 1, 2)
        if b is not None:
            out = out + b.reshape(1, -1, 1, 1)
        return np.ascontiguousarray(out)

    def backward(self, grad):
        x, w = self.inputs[0], self.inputs[1]
        out_ch, _, kh, kw = w.shape
        grad_rows = grad.transpose(0, 2, 3, 1).reshape(-1, out_ch)
        grad_w = (grad_rows.T @ self.cols).reshape(w.shape)
        grad_cols = grad_rows @ w.values.reshape(out_ch, -1)
        grad_xp = col2im(grad_cols, np.zeros(self.padded_shape, dtype=grad.dtype), kh, kw, self.stride, self.out_hw)
        p = self.pad
        grad_x = grad_xp[:, :, p:p + x.shape[2], p:p + x.shape[3]]
        if len(self.inputs) == 3:
            return grad_x, grad_w, grad.sum(axis=(0, 2, 3))
        return grad_x, grad_w


class ConvTranspose2d(Function):
    def forward(self, x, w, b=None, stride=1, pad=0, output_padding=0):
        self.stride, self.pad = stride, pad
        n, in_ch, h, wd = x.shape
        _, out_ch, kh, kw = w.shape
        full_shape = (n, out_ch, (h - 1) * stride + kh + output_padding, (wd - 1) * stride + kw + output_padding)
        self.full_shape = full_shape
        self.x_rows = np.ascontiguousarray(x.transpose(0, 2, 3, 1)).reshape(-1, in_ch)
        cols = self.x_rows @ w.reshape(in_ch, -1)
        full = col2im(cols, np.zeros(full_shape, dtype=cols.dtype), kh, kw, stride, (h, wd))
        self.out_hw = (full_shape[2] - 2 * pad, full_shape[3] - 2 * pad)
        out = full[:, :, pad:pad + self.out_hw[0], pad:pad + self.out_hw[1]]
        if b is not None:
            out = out + b.reshape(1, -1, 1, 1)
        return np.ascontiguousarray(out)

    def backward(self, grad):
        x, w = self.inputs[0], self.inputs[1]
        n, in_ch, h, wd = x.shape
        _, _, kh, kw = w.shape
        p = self.pad
        grad_full = np.zeros(self.full_shape, dtype=grad.dtype)
        grad_full[:, :, p:p + self.out_hw[0], p:p + self.out_hw[1]] = grad
        cols = im2col(grad_full, kh, kw, self.stride, out_hw=(h, wd))
        grad_x = (cols @ w.values.reshape(in_ch, -1).T).reshape(n, h, wd, in_ch).transpose(0, 3, 1, 2)
        grad_w = (self.x_rows.T @ cols).reshape(w.shape)
        if len(self.inputs) == 3:
            return grad_x, grad_w, grad.sum(axis=(0, 2, 3))
        return grad_x, grad_w


class MaxPool2(Function):
    def forward(self, x, argmax):
        self.argmax = argmax[..., None].astype(np.intp)
        return np.take_along_axis(to_windows(x), self.argmax, axis=-1)[..., 0]

    def backward(self, grad):
        windows = np.zeros(grad.shape + (4,), dtype=grad.dtype)
        np.put_along_axis(windows, self.argmax, grad[..., None], axis=-1)
        return from_windows(windows)


class MaxUnpool2(Function):
    def forward(self, y, argmax):
        self.argmax = argmax[..., None].astype(np.intp)
        windows = np.zeros(y.shape + (4,), dtype=y.dtype)
        np.put_along_axis(windows, self.argmax, y[..., None], axis=-1)
        return from_windows(windows)

    def backward(self, grad):
        return np.take_along_axis(to_windows(grad), self.argmax, axis=-1)[..., 0]


class UpsampleNearest2(Function):
    def forward(self, x):
        return x.repeat(2, axis=2).repeat(2, axis=3)

    def backward(self, grad):
        n, c, h, w = grad.shape
        return grad.reshape(n, c, h // 2, 2, w // 2, 2).sum(axis=(3, 5))


class BatchNorm(Function):
    def forward(self, x, gamma, beta, state: BatchNormState, training: bool, update_stats: bool):
        axes = (0, 2, 3)
        self.training = training
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            if update_stats:
                count = x.size // x.shape[1]
                unbiased = var * count / max(count - 1, 1)
                state.running_mean[...] = (1 - state.momentum) * state.running_mean + state.momentum * mean
                state.running_var[...] = (1 - state.momentum) * state.running_var + state.momentum * unbiased
        else:
            mean, var = state.running_mean.astype(x.dtype), state.running_var.astype(x.dtype)
        self.inv_std = (1.0 / np.sqrt(var + state.eps)).reshape(1, -1, 1, 1)
        self.x_hat = (x - mean.reshape(1, -1, 1, 1)) * self.inv_std
        return gamma.reshape(1, -1, 1, 1) * self.x_hat + beta.reshape(1, -1, 1, 1)

    def backward(self, grad):
        axes = (0, 2, 3)
        gamma = self.inputs[1].values.reshape(1, -1, 1, 1)
        grad_gamma = (grad * self.x_hat).sum(axis=axes)
        grad_beta = grad.sum(axis=axes)
        dx_hat = grad * gamma
        if self.training:
            count = grad.size // grad.shape[1]
            grad_x = self.inv_std / count * (count * dx_hat
                                              - dx_hat.sum(axis=axes, keepdims=True)
                                              - self.x_hat * (dx_hat * self.x_hat).sum(axis=axes, keepdims=True))
        else:
            grad_x = dx_hat * self.inv_std
        return grad_x, grad_gamma, grad_beta


class ReLU(Function):
    def forward(self, x):
        self.mask = x > 0
        return x * self.mask

    def backward(self, grad):
        return grad * self.mask


class LeakyReLU(Function):
    def forward(self, x, slope):
        self.slope = slope
        self.mask = x > 0
        return np.where(self.mask, x, slope * x)

    def backward(self, grad):
        return np.where(self.mask, grad, self.slope * grad)


class Tanh(Function):
    def forward(self, x):
        self.out = np.tanh(x)
        return self.out

    def backward(self, grad):
        return grad * (1 - self.out * self.out)


class Concat(Function):
    def forward(self, *arrays, axis):
        self.axis = axis
        self.splits = np.cumsum([a.shape[axis] for a in arrays])[:-1]
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        return tuple(np.split(grad, self.splits, axis=self.axis))


class Berhu(Function):
    def forward(self, pred, target):
        e = pred - target
        a = np.abs(e)
        self.e = e
        self.max_pos = int(np.argmax(a))
        self.c = 0.2 * a.reshape(-1)[self.max_pos]
        if self.c == 0:
            return np.zeros((), dtype=e.dtype)
        self.quadratic = a > self.c
        values = np.where(self.quadratic, (e * e + self.c * self.c) / (2 * self.c), a)
        return np.mean(values)

    def backward(self, grad):
        e, c = self.e, self.c
        if c == 0:
            zeros = np.zeros_like(e)
            return zeros, zeros
        grad_e = np.where(self.quadratic, e / c, np.sign(e))
        # the cutoff follows the largest error, so that element also carries dB/dc
        grad_c = np.where(self.quadratic, (c * c - e * e) / (2 * c * c), 0).sum()
        grad_e.reshape(-1)[self.max_pos] += grad_c * 0.2 * np.sign(e.reshape(-1)[self.max_pos])
        grad_e = grad * grad_e / e.size
        return grad_e, -grad_e


class SoftmaxCrossEntropy(Function):
    def forward(self, logits, labels):
        log_probs = log_softmax(logits, axis=1).astype(logits.dtype, copy=False)
        self.index = labels[:, None].astype(np.intp)
        self.probs = np.exp(log_probs)
        return -np.take_along_axis(log_probs, self.index, axis=1).mean()

    def backward(self, grad):
        delta = self.probs.copy()
        np.put_along_axis(delta, self.index, np.take_along_axis(delta, self.index, axis=1) - 1, axis=1)
        return grad * delta / self.index.size


def _check_kernel(x: Tensor, w: Tensor, b: Optional[Tensor], stride: int, pad: int, in_axis: int,
                  out_axis: int) -> None:
    check_4d(x.values, "input")
    check_4d(w.values, "weight")
    if x.shape[1] != w.shape[in_axis]:
        raise DimensionError(f"input channels (axis 1) = {x.shape[1]} but weight input channels "
                             f"(axis {in_axis}) = {w.shape[in_axis]}")
    if b is not None and b.shape != (w.shape[out_axis],):
        raise DimensionError(f"bias shape {b.shape} does not match weight output channels "
                             f"(axis {out_axis}) = {w.shape[out_axis]}")
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    if pad < 0:
        raise ParameterError(f"pad must be >= 0, got {pad}")


def conv2d(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1, pad: int = 0) -> Tensor:
    """
    2-D cross-correlation. w is (out_ch, in_ch, kh, kw).
    Output size floor((H + 2*pad - kh) / stride) + 1 per spatial axis.
    """
    _check_kernel(x, w, b, stride, pad, in_axis=1, out_axis=0)
    _, _, kh, kw = w.shape
    if conv_output_size(x.shape[2], kh, stride, pad) < 1 or conv_output_size(x.shape[3], kw, stride, pad) < 1:
        raise DimensionError(f"kernel {kh}x{kw} larger than padded input (axes 2, 3) {x.shape[2:]}")
    inputs = (x, w) if b is None else (x, w, b)
    return Conv2d.apply(*inputs, stride=stride, pad=pad)


def conv2d_transpose(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1, pad: int = 0,
                     output_padding: int = 0) -> Tensor:
    """
    Transposed convolution (adjoint of conv2d). w is (in_ch, out_ch, kh, kw).
    Output size (H - 1) * stride - 2 * pad + kh + output_padding per spatial axis.
    """
    _check_kernel(x, w, b, stride, pad, in_axis=0, out_axis=1)
    if output_padding < 0 or output_padding >= stride:
        raise ParameterError(f"output_padding {output_padding} out of range for stride {stride}")
    _, _, kh, kw = w.shape
    if (x.shape[2] - 1) * stride - 2 * pad + kh + output_padding < 1:
        raise DimensionError(f"padding {pad} removes the whole output on axes 2, 3")
    inputs = (x, w) if b is None else (x, w, b)
    return ConvTranspose2d.apply(*inputs, stride=stride, pad=pad, output_padding=output_padding)


def maxpool2_indices(x: Tensor) -> Tuple[Tensor, PoolingIndices]:
    """
    2x2 / stride-2 max pooling that also returns the argmax of every window.
    Ties go to the first element of the row-major window scan.
    """
    check_4d(x.values, "input")
    if x.shape[2] % 2 or x.shape[3] % 2:
        raise DimensionError(f"pooling needs even height (axis 2) and width (axis 3), got {x.shape[2:]}")
    argmax = to_windows(x.values).argmax(axis=-1).astype(np.int8)
    return MaxPool2.apply(x, argmax=argmax), PoolingIndices(argmax=argmax, input_shape=tuple(x.shape))


def maxunpool2(y: Tensor, indices: PoolingIndices, out_shape: Optional[Sequence[int]] = None) -> Tensor:
    """
    Place every pooled value at its recorded argmax; every other position is 0.
    """
    out_shape = tuple(indices.input_shape if out_shape is None else out_shape)
    if tuple(out_shape[2:]) != tuple(indices.input_shape[2:]) or out_shape[:2] != tuple(y.shape[:2]):
        raise DimensionError(f"indices were recorded for {indices.input_shape}, cannot unpool to {out_shape}")
    if tuple(y.shape) != tuple(indices.argmax.shape):
        raise DimensionError(f"pooled tensor {y.shape} does not match indices {indices.argmax.shape} "
                             f"on axes (batch, channels, height, width)")
    return MaxUnpool2.apply(y, argmax=indices.argmax)


def upsample_nearest2(x: Tensor) -> Tensor:
    check_4d(x.values, "input")
    return UpsampleNearest2.apply(x)


def batchnorm(x: Tensor, gamma: Tensor, beta: Tensor, state: BatchNormState, mode: Mode = Mode.train,
              update_stats: bool = True) -> Tensor:
    """
    Per-channel batch normalisation. Train mode normalises with batch statistics
    and (unless update_stats is False) moves the running statistics; eval mode
    uses the running statistics.
    """
    check_4d(x.values, "input")
    channels = x.shape[1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise DimensionError(f"gamma {gamma.shape} / beta {beta.shape} must have length channels (axis 1) = {channels}")
    return BatchNorm.apply(x, gamma, beta, state=state, training=mode is Mode.train, update_stats=update_stats)


def relu(x: Tensor) -> Tensor:
    return ReLU.apply(x)


def leaky_relu(x: Tensor, slope: float = LEAKY_SLOPE) -> Tensor:
    return LeakyReLU.apply(x, slope=slope)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    reference = tensors[0].shape
    for t in tensors[1:]:
        if t.ndim != len(reference) or any(a != b for k, (a, b) in enumerate(zip(t.shape, reference)) if k != axis):
            raise DimensionError(f"cannot concatenate {t.shape} with {reference} along axis {axis}")
    return Concat.apply(*tensors, axis=axis)


def add_gaussian_noise(x: Tensor, sigma: float, rng: np.random.Generator) -> Tensor:
    """x + N(0, sigma^2) drawn from rng; the gradient passes through unchanged."""
    if sigma < 0:
        raise ParameterError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return x
    noise = (rng.standard_normal(x.shape) * sigma).astype(x.dtype)
    return x + Tensor(noise)


def weighted_sum(tensors: Sequence[Tensor], weights: Sequence[float]) -> Tensor:
    shape = tensors[0].shape
    if any(t.shape != shape for t in tensors):
        raise DimensionError(f"weighted sum needs equal shapes, got {[t.shape for t in tensors]}")
    total = tensors[0] * float(weights[0])
    for t, weight in zip(tensors[1:], weights[1:]):
        total = total + t * float(weight)
    return total


def berhu(pred: Tensor, target: Tensor) -> Tensor:
    return Berhu.apply(pred, target)


def softmax_cross_entropy(logits: Tensor, labels: NDArray) -> Tensor:
    return SoftmaxCrossEntropy.apply(logits, labels=labels)
