import logging

import numpy as np

from tensorcore import DimensionError, Mode, Tensor

from .check_config import check_arch
from .config import DISCRIMINATOR_KERNEL, KERNEL_SIZE, RGB_CHANNELS
from .datatypes import ArchConfig
from .layers import ConvBlock, ConvHead, Network

logger = logging.getLogger(__name__)


class Discriminator(Network):
    """
    Patch discriminator for RGB images: stride-2 conv blocks with LeakyReLU,
    then a one-channel conv head. Scores are raw (least-squares GAN).
    """

    def __init__(self, arch: ArchConfig, rng: np.random.Generator, name: str = "disc_R"):
        super().__init__(name)
        in_channels = RGB_CHANNELS
        for k, channels in enumerate(arch.discriminator_channels):
            self.add(ConvBlock(f"{name}.block{k}", in_channels, channels, DISCRIMINATOR_KERNEL, rng, stride=2,
                               leaky=True))
            in_channels = channels
        self.head = self.add(ConvHead(f"{name}.head", in_channels, 1, KERNEL_SIZE, rng))
        self.downsampling = 2 ** len(arch.discriminator_channels)

    def __call__(self, x: Tensor, mode: Mode = Mode.train) -> Tensor:
        if x.ndim != 4 or x.shape[1] != RGB_CHANNELS:
            raise DimensionError(f"{self.name} expects RGB input with {RGB_CHANNELS} channels (axis 1), "
                                 f"got shape {x.shape}")
        if x.shape[2] % self.downsampling or x.shape[3] % self.downsampling:
            raise DimensionError(f"{self.name}: height/width (axes 2, 3) {x.shape[2:]} not divisible by "
                                 f"{self.downsampling}")
        out = x
        for layer in self.layers:
            out = layer(out, mode, not self.frozen)
        return out


def build_discriminator(arch: ArchConfig, rng: np.random.Generator) -> Discriminator:
    check_arch(arch)
    discriminator = Discriminator(arch, rng)
    logger.debug("built %s with %d blocks", discriminator.name, len(arch.discriminator_channels))
    return discriminator


def discriminate(d: Discriminator, x: Tensor, mode: Mode = Mode.train) -> Tensor:
    return d(x, mode)
