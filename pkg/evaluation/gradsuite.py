"""
Gradient fidelity suite: every differentiable primitive and every loss term,
composed with a small convolution where it needs one, checked against central
finite differences in 64-bit precision.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from tensorcore import (BatchNormState, Mode, Tensor, berhu, conv2d, conv2d_transpose, grad_check, leaky_relu,
                        maxpool2_indices, maxunpool2, relu, tanh, upsample_nearest2, batchnorm, concat)
from networks import ArchConfig, SideInfoMode
from translation import DepthBatch, LossWeights, SegBatch, TrainConfig, build_mixmatch_graph
from translation.config import DEPTH, RGB, SEGMENTATION
from translation.losses import (berhu_loss, combined_loss, cross_entropy_loss, l2_loss, latent_consistency_loss,
                                lsgan_d_loss, lsgan_g_loss)

logger = logging.getLogger(__name__)

PRIMITIVE_TOLERANCE = 1e-4
LOSS_TOLERANCE = 1e-3


@dataclass
class GradCase:
    name: str
    tolerance: float
    build: Callable[[np.random.Generator], Tuple[Callable[[Tensor], Tensor], Tensor, List[Tensor]]]


def _tensor(rng: np.random.Generator, *shape) -> Tensor:
    return Tensor(rng.standard_normal(shape))


def _away_from_zero(rng: np.random.Generator, *shape) -> Tensor:
    magnitude = rng.uniform(0.2, 1.0, size=shape)
    return Tensor(np.where(rng.random(shape) < 0.5, -magnitude, magnitude))


def _distinct(rng: np.random.Generator, *shape) -> Tensor:
    """Values spaced well apart so pooling windows have no near-ties."""
    n = int(np.prod(shape))
    return Tensor((rng.permutation(n) * 0.1 + 0.1).reshape(shape))


def _weighted(out: Tensor, weights: Tensor) -> Tensor:
    return (out * weights).sum()


def _conv(rng):
    x, w, b = _tensor(rng, 2, 3, 8, 8), _tensor(rng, 4, 3, 3, 3), _tensor(rng, 4)
    r = _tensor(rng, 2, 4, 8, 8)
    return lambda x_: _weighted(conv2d(x_, w, b, stride=1, pad=1), r), x, [w, b]


def _strided_conv(rng):
    x, w = _tensor(rng, 1, 2, 8, 8), _tensor(rng, 3, 2, 5, 5)
    r = _tensor(rng, 1, 3, 4, 4)
    return lambda x_: _weighted(conv2d(x_, w, stride=2, pad=2), r), x, [w]


def _conv_transpose(rng):
    x, w, b = _tensor(rng, 1, 2, 4, 4), _tensor(rng, 2, 3, 5, 5), _tensor(rng, 3)
    r = _tensor(rng, 1, 3, 8, 8)
    return (lambda x_: _weighted(conv2d_transpose(x_, w, b, stride=2, pad=2, output_padding=1), r), x, [w, b])


def _pool_unpool(rng):
    x = _distinct(rng, 1, 2, 4, 4)
    r = _tensor(rng, 1, 2, 4, 4)

    def fn(x_):
        pooled, indices = maxpool2_indices(x_)
        return _weighted(maxunpool2(pooled * 2.0, indices), r)
    return fn, x, []


def _upsample(rng):
    x, r = _tensor(rng, 1, 2, 3, 3), _tensor(rng, 1, 2, 6, 6)
    return lambda x_: _weighted(upsample_nearest2(x_), r), x, []


def _batchnorm(rng):
    x, gamma, beta = _tensor(rng, 3, 2, 4, 4), _tensor(rng, 2), _tensor(rng, 2)
    r = _tensor(rng, 3, 2, 4, 4)
    state = BatchNormState.create(2, dtype=np.float64)
    return (lambda x_: _weighted(batchnorm(x_, gamma, beta, state, Mode.train, update_stats=False), r),
            x, [gamma, beta])


def _activations(rng):
    x, r = _away_from_zero(rng, 1, 2, 4, 4), _tensor(rng, 1, 6, 4, 4)
    return lambda x_: _weighted(concat([relu(x_), leaky_relu(x_), tanh(x_)], axis=1), r), x, []


def _micro_conv(rng, out_channels: int = 3):
    """A single 3x3 convolution, the network the loss checks run through."""
    w = _tensor(rng, out_channels, 2, 3, 3)
    return w, lambda x_: conv2d(x_, w, pad=1)


def _l2(rng):
    x, target = _tensor(rng, 2, 2, 4, 4), _tensor(rng, 2, 3, 4, 4)
    w, net = _micro_conv(rng)
    return lambda x_: l2_loss(net(x_), target), x, [w]


def _berhu(rng):
    x, target = _tensor(rng, 2, 2, 4, 4), _tensor(rng, 2, 1, 4, 4)
    w, net = _micro_conv(rng, 1)
    return lambda x_: berhu_loss(net(x_), target), x, [w]


def _berhu_cutoff(rng):
    """Errors straddling the cutoff on both sides."""
    target = Tensor(np.zeros((1, 1, 1, 4)))
    x = Tensor(np.array([1.0, 0.2 + 1e-4, 0.2 - 1e-4, -0.05]).reshape(1, 1, 1, 4))
    return lambda x_: berhu(x_, target), x, []


def _cross_entropy(rng):
    x = _tensor(rng, 2, 2, 4, 4)
    labels = rng.integers(0, 5, size=(2, 4, 4))
    w, net = _micro_conv(rng, 5)
    return lambda x_: cross_entropy_loss(net(x_), labels), x, [w]


def _lsgan_d(rng):
    x, real = _tensor(rng, 2, 2, 4, 4), _tensor(rng, 2, 1, 4, 4)
    w, net = _micro_conv(rng, 1)
    return lambda x_: lsgan_d_loss(real, net(x_)), x, [w]


def _lsgan_g(rng):
    x = _tensor(rng, 2, 2, 4, 4)
    w, net = _micro_conv(rng, 1)
    return lambda x_: lsgan_g_loss(net(x_)), x, [w]


def _latent(rng):
    x = _tensor(rng, 2, 2, 4, 4)
    w_a, net_a = _micro_conv(rng)
    w_b, net_b = _micro_conv(rng)
    return lambda x_: latent_consistency_loss(net_a(x_), net_b(x_)), x, [w_a, w_b]


def _micro_graph(rng):
    arch = ArchConfig(stages=[(1, 2)], input_resolution=(8, 8), discriminator_channels=(2,))
    return build_mixmatch_graph(arch, 4, SideInfoMode.pooling_indices, seed=int(rng.integers(2 ** 31)))


def _micro_batches(rng, batch: int = 2, size: int = 8) -> Tuple[SegBatch, DepthBatch]:
    def rgb():
        return rng.uniform(-1.0, 1.0, (batch, 3, size, size))
    return (SegBatch(rgb=rgb(), seg=rng.integers(0, 4, (batch, size, size))),
            DepthBatch(rgb=rgb(), depth=rng.uniform(0.1, 1.0, (batch, 1, size, size))))


def _combined(rng):
    """
    The whole generator objective through a one-stage graph, in eval mode and
    without latent noise. Checked w.r.t. the shared RGB encoder's last
    batchnorm scale and the three decoder heads.
    """
    graph = _micro_graph(rng)
    batch_d1, batch_d2 = _micro_batches(rng)
    cfg = TrainConfig(noise=False)
    x = graph.encoders[RGB].layers[-1].params["gamma"]
    heads = [p for name in (RGB, DEPTH, SEGMENTATION) for p in graph.decoders[name].layers[-1].parameters()]
    return (lambda x_: combined_loss(batch_d1, batch_d2, graph, LossWeights.phase2(), Mode.eval, cfg)[0],
            x, heads)


GRAD_CASES: Tuple[GradCase, ...] = (
    GradCase("conv2d", PRIMITIVE_TOLERANCE, _conv),
    GradCase("conv2d_stride2", PRIMITIVE_TOLERANCE, _strided_conv),
    GradCase("conv2d_transpose", PRIMITIVE_TOLERANCE, _conv_transpose),
    GradCase("maxpool_unpool", PRIMITIVE_TOLERANCE, _pool_unpool),
    GradCase("upsample_nearest", PRIMITIVE_TOLERANCE, _upsample),
    GradCase("batchnorm", PRIMITIVE_TOLERANCE, _batchnorm),
    GradCase("activations", PRIMITIVE_TOLERANCE, _activations),
    GradCase("l2", LOSS_TOLERANCE, _l2),
    GradCase("berhu", LOSS_TOLERANCE, _berhu),
    GradCase("berhu_cutoff", LOSS_TOLERANCE, _berhu_cutoff),
    GradCase("cross_entropy", LOSS_TOLERANCE, _cross_entropy),
    GradCase("lsgan_d", LOSS_TOLERANCE, _lsgan_d),
    GradCase("lsgan_g", LOSS_TOLERANCE, _lsgan_g),
    GradCase("latent_consistency", LOSS_TOLERANCE, _latent),
    GradCase("combined_loss", LOSS_TOLERANCE, _combined),
)


def run_grad_suite(seed: int = 0, cases: Sequence[GradCase] = GRAD_CASES) -> pd.DataFrame:
    """One row per case: name, max relative error, tolerance, passed."""
    rows = []
    for case in cases:
        fn, x, params = case.build(np.random.default_rng([seed, len(rows)]))
        error = grad_check(fn, x, params=params)
        rows.append({"case": case.name, "max_rel_error": error, "tolerance": case.tolerance,
                     "passed": bool(error < case.tolerance)})
        logger.debug("grad check %s: %.3e", case.name, error)
    return pd.DataFrame(rows, columns=["case", "max_rel_error", "tolerance", "passed"])
