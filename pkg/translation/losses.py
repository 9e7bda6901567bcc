"""
Loss terms for joint training of the RGB-segmentation and RGB-depth translators.

Term names used throughout reports:
    SR, DR, RR   L2 on RGB decoded from segmentation, depth and RGB latents
    GAN          least-squares generator loss on the decoded RGB images
    RD, DD       Berhu on depth decoded from RGB and depth latents
    RS, SS       cross-entropy on labels decoded from RGB and segmentation latents
    LAT          latent consistency between paired RGB/segmentation and RGB/depth codes
"""
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from tensorcore import (CompositionError, DimensionError, Mode, ParameterError, Tensor, berhu, concat,
                        softmax_cross_entropy)

from .config import RGB, DEPTH, SEGMENTATION
from .datatypes import DepthBatch, LossBreakdown, LossWeights, SegBatch, TrainConfig
from .utils import one_hot

if TYPE_CHECKING:
    from .graph import TranslationGraph

logger = logging.getLogger(__name__)


def _check_same_shape(pred: Tensor, target: Tensor, what: str) -> None:
    if pred.shape != target.shape:
        raise DimensionError(f"{what}: prediction shape {pred.shape} differs from target shape {target.shape}")


def l2_loss(pred: Tensor, target: Tensor) -> Tensor:
    _check_same_shape(pred, target, "l2_loss")
    return (pred - target).square().mean()


def berhu_loss(pred: Tensor, target: Tensor) -> Tensor:
    """Reverse Huber with cutoff 0.2 * max|pred - target|; zero when the tensors agree."""
    _check_same_shape(pred, target, "berhu_loss")
    return berhu(pred, target)


def cross_entropy_loss(logits: Tensor, labels: NDArray, num_classes: Optional[int] = None) -> Tensor:
    num_classes = logits.shape[1] if num_classes is None else num_classes
    if logits.ndim != 4 or logits.shape[1] != num_classes:
        raise DimensionError(f"logits must be (batch, {num_classes}, height, width), got {logits.shape}")
    labels = np.asarray(labels)
    expected = (logits.shape[0],) + logits.shape[2:]
    if labels.shape != expected:
        raise DimensionError(f"labels shape {labels.shape} does not match logits (batch, height, width) {expected}")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ParameterError(f"labels must lie in [0, {num_classes}), got [{labels.min()}, {labels.max()}]")
    return softmax_cross_entropy(logits, labels)


def lsgan_d_loss(scores_real: Tensor, scores_fake: Tensor) -> Tensor:
    return (scores_real - 1.0).square().mean() + scores_fake.square().mean()


def lsgan_g_loss(scores_fake: Tensor) -> Tensor:
    return (scores_fake - 1.0).square().mean()


def latent_consistency_loss(h_a: Tensor, h_b: Tensor) -> Tensor:
    _check_same_shape(h_a, h_b, "latent_consistency_loss")
    return (h_a - h_b).square().mean()


@dataclass
class GeneratorPass:
    total: Tensor
    breakdown: LossBreakdown
    fake_rgb: Optional[Tensor]


def generator_pass(batch_d1: SegBatch, batch_d2: DepthBatch, graph: "TranslationGraph", weights: LossWeights,
                   mode: Mode = Mode.train, cfg: Optional[TrainConfig] = None,
                   rng: Optional[np.random.Generator] = None) -> GeneratorPass:
    """
    Encode both batches, decode every seen translation and autoencoder, and
    collect the weighted loss. The decoded RGB images are returned so the
    discriminator can be trained on them.
    """
    cfg = TrainConfig() if cfg is None else cfg
    for name in (RGB, DEPTH, SEGMENTATION):
        if name not in graph.encoders or name not in graph.decoders:
            raise CompositionError(f"combined loss needs encoder and decoder for modality '{name}'")
    num_classes = graph.modalities[SEGMENTATION].channels
    sigma = cfg.effective_sigma
    enc_r, enc_d, enc_s = graph.encoders[RGB], graph.encoders[DEPTH], graph.encoders[SEGMENTATION]
    dec_r, dec_d, dec_s = graph.decoders[RGB], graph.decoders[DEPTH], graph.decoders[SEGMENTATION]

    x1, y1 = Tensor(batch_d1.rgb), batch_d1.seg
    x2, z2 = Tensor(batch_d2.rgb), Tensor(batch_d2.depth)
    e_r1 = enc_r(x1, sigma, mode, rng)
    e_s1 = enc_s(Tensor(one_hot(y1, num_classes)), sigma, mode, rng)
    e_r2 = enc_r(x2, sigma, mode, rng)
    e_d2 = enc_d(z2, sigma, mode, rng)

    terms: Dict[str, Tensor] = {}
    fake_sr = dec_r(e_s1.latent, e_s1, mode)
    fake_dr = dec_r(e_d2.latent, e_d2, mode)
    terms["SR"] = l2_loss(fake_sr, x1)
    terms["DR"] = l2_loss(fake_dr, x2)
    fakes = [fake_sr, fake_dr]
    if cfg.autoencoders:
        fake_rr = dec_r(concat([e_r1.latent, e_r2.latent], axis=0), None, mode)
        terms["RR"] = l2_loss(fake_rr, Tensor(np.concatenate([batch_d1.rgb, batch_d2.rgb], axis=0)))
        fakes.append(fake_rr)
    fake_rgb = concat(fakes, axis=0)
    if graph.discriminator is None:
        raise CompositionError("combined loss needs the RGB discriminator")
    terms["GAN"] = lsgan_g_loss(graph.discriminator(fake_rgb, mode))

    terms["RD"] = berhu_loss(dec_d(e_r2.latent, e_r2, mode), z2)
    if cfg.autoencoders:
        terms["DD"] = berhu_loss(dec_d(e_d2.latent, e_d2, mode), z2)
    terms["RS"] = cross_entropy_loss(dec_s(e_r1.latent, e_r1, mode), y1, num_classes)
    if cfg.autoencoders:
        terms["SS"] = cross_entropy_loss(dec_s(e_s1.latent, e_s1, mode), y1, num_classes)
    if cfg.latent_loss:
        terms["LAT"] = (latent_consistency_loss(e_r1.clean_latent, e_s1.clean_latent)
                        + latent_consistency_loss(e_r2.clean_latent, e_d2.clean_latent))

    term_weights = weights.term_weights()
    total = None
    for name, term in terms.items():
        weighted = term * term_weights[name]
        total = weighted if total is None else total + weighted
    breakdown = LossBreakdown(raw={name: term.item() for name, term in terms.items()},
                              weights={name: term_weights[name] for name in terms},
                              total=total.item())
    return GeneratorPass(total=total, breakdown=breakdown, fake_rgb=fake_rgb)


def combined_loss(batch_d1: SegBatch, batch_d2: DepthBatch, graph: "TranslationGraph", weights: LossWeights,
                  mode: Mode = Mode.train, cfg: Optional[TrainConfig] = None,
                  rng: Optional[np.random.Generator] = None) -> Tuple[Tensor, LossBreakdown]:
    result = generator_pass(batch_d1, batch_d2, graph, weights, mode, cfg, rng)
    return result.total, result.breakdown


def discriminator_loss(graph: "TranslationGraph", real_rgb: NDArray, fake_rgb: Tensor,
                       mode: Mode = Mode.train) -> Tensor:
    """LSGAN critic loss on real images against detached generator outputs."""
    if graph.discriminator is None:
        raise CompositionError("no RGB discriminator registered")
    real = graph.discriminator(Tensor(real_rgb), mode)
    fake = graph.discriminator(fake_rgb.detach(), mode)
    return lsgan_d_loss(real, fake)
