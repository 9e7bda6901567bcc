import logging
from typing import List, Optional

import numpy as np

from tensorcore import ContractError, DimensionError, Mode, PoolingIndices, Tensor, add_gaussian_noise, maxpool2_indices

from .check_config import check_arch, check_modality
from .datatypes import ArchConfig, EncoderOutput, ModalitySpec
from .layers import ConvBlock, Network

logger = logging.getLogger(__name__)


class Encoder(Network):
    """
    VGG-style encoder: every stage is a run of conv blocks followed by a 2x2
    max pooling whose indices are kept as side information. Only the first
    conv depends on the modality.
    """

    def __init__(self, spec: ModalitySpec, arch: ArchConfig, rng: np.random.Generator):
        super().__init__(f"enc_{spec.name}")
        self.spec = spec
        self.arch = arch
        self.stages: List[List[ConvBlock]] = []
        in_channels = spec.channels
        for s, (num_convs, channels) in enumerate(arch.stages):
            blocks = []
            for k in range(num_convs):
                blocks.append(self.add(ConvBlock(f"{self.name}.stage{s}.conv{k}", in_channels, channels,
                                                 arch.kernel_size, rng)))
                in_channels = channels
            self.stages.append(blocks)

    def __call__(self, x: Tensor, noise_sigma: float = 0.0, mode: Mode = Mode.eval,
                 rng: Optional[np.random.Generator] = None) -> EncoderOutput:
        if x.ndim != 4 or x.shape[1] != self.spec.channels:
            raise DimensionError(f"{self.name} expects {self.spec.channels} input channels (axis 1), "
                                 f"got shape {x.shape}")
        scale = 2 ** self.arch.num_stages
        if x.shape[2] % scale or x.shape[3] % scale:
            raise DimensionError(f"{self.name}: height/width (axes 2, 3) {x.shape[2:]} not divisible by {scale}")
        update_stats = not self.frozen
        indices: List[PoolingIndices] = []
        skips: List[Tensor] = []
        out = x
        for blocks in self.stages:
            for block in blocks:
                out = block(out, mode, update_stats)
            skips.append(out)
            out, idx = maxpool2_indices(out)
            indices.append(idx)
        latent = out
        if mode is Mode.train and noise_sigma > 0:
            if rng is None:
                raise ContractError(f"{self.name}: latent noise in train mode needs a random generator")
            latent = add_gaussian_noise(out, noise_sigma, rng)
        return EncoderOutput(latent=latent, clean_latent=out, indices=indices, skip_features=skips)


def build_encoder(spec: ModalitySpec, arch: ArchConfig, rng: np.random.Generator) -> Encoder:
    check_arch(arch)
    check_modality(spec)
    encoder = Encoder(spec, arch, rng)
    logger.debug("built %s with %d parameters", encoder.name, sum(p.size for p in encoder.parameters()))
    return encoder


def encode(enc: Encoder, x: Tensor, noise_sigma: float = 0.0, mode: Mode = Mode.eval,
           rng: Optional[np.random.Generator] = None) -> EncoderOutput:
    return enc(x, noise_sigma, mode, rng)
