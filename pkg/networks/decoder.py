import logging
from typing import List, Optional, Union

import numpy as np

from tensorcore import ContractError, DimensionError, Mode, Tensor, concat, maxunpool2, tanh, upsample_nearest2

from .check_config import check_arch, check_modality
from .config import TRANSPOSED_KERNEL
from .datatypes import ArchConfig, EncoderOutput, ModalitySpec, OutputActivation, SideInfoMode, UpsamplingMode
from .layers import ConvBlock, ConvHead, Network, UpConvBlock

logger = logging.getLogger(__name__)


class Decoder(Network):
    """
    Mirror of the encoder. Stage s first restores the resolution produced by
    encoder stage s (unpooling, nearest upsampling or a transposed conv),
    then applies that stage's convs; the last conv of the shallowest stage
    is the output head.
    """

    def __init__(self, spec: ModalitySpec, arch: ArchConfig, rng: np.random.Generator):
        super().__init__(f"dec_{spec.name}")
        self.spec = spec
        self.arch = arch
        self.side_info = spec.decoder_side_info
        self.upsamplers: List[Optional[UpConvBlock]] = []
        self.stages: List[List[Union[ConvBlock, ConvHead]]] = []
        for s in reversed(range(arch.num_stages)):
            num_convs, channels = arch.stages[s]
            if self.side_info is SideInfoMode.none and arch.upsampling is UpsamplingMode.transposed:
                self.upsamplers.append(self.add(UpConvBlock(f"{self.name}.stage{s}.up", channels, TRANSPOSED_KERNEL,
                                                            rng)))
            else:
                self.upsamplers.append(None)
            in_channels = 2 * channels if self.side_info is SideInfoMode.skip_connections else channels
            blocks = []
            for k in range(num_convs):
                last = k == num_convs - 1
                name = f"{self.name}.stage{s}.conv{k}"
                if last and s == 0:
                    blocks.append(self.add(ConvHead(name, in_channels, spec.channels, arch.kernel_size, rng)))
                else:
                    out_channels = arch.stages[s - 1][1] if last else channels
                    blocks.append(self.add(ConvBlock(name, in_channels, out_channels, arch.kernel_size, rng)))
                    in_channels = out_channels
            self.stages.append(blocks)

    def _check_side(self, side: Optional[EncoderOutput]) -> None:
        if self.side_info is SideInfoMode.none:
            return
        if side is None:
            raise ContractError(f"{self.name} uses {self.side_info.name} and needs side information")
        available = len(side.indices) if self.side_info is SideInfoMode.pooling_indices else len(side.skip_features)
        if available != self.arch.num_stages:
            raise DimensionError(f"{self.name} has {self.arch.num_stages} stages but side information "
                                 f"carries {available}")

    def __call__(self, latent: Tensor, side: Optional[EncoderOutput] = None, mode: Mode = Mode.eval) -> Tensor:
        self._check_side(side)
        expected = self.arch.latent_channels
        if latent.ndim != 4 or latent.shape[1] != expected:
            raise DimensionError(f"{self.name} expects a latent with {expected} channels (axis 1), "
                                 f"got shape {latent.shape}")
        out = latent
        for i, s in enumerate(reversed(range(self.arch.num_stages))):
            if self.side_info is SideInfoMode.pooling_indices:
                out = maxunpool2(out, side.indices[s])
            elif self.side_info is SideInfoMode.skip_connections:
                out = concat([upsample_nearest2(out), side.skip_features[s]], axis=1)
            elif self.upsamplers[i] is not None:
                out = self.upsamplers[i](out, mode, not self.frozen)
            else:
                out = upsample_nearest2(out)
            for block in self.stages[i]:
                out = block(out, mode, not self.frozen)
        if self.spec.output_activation is OutputActivation.tanh:
            out = tanh(out)
        return out


def build_decoder(spec: ModalitySpec, arch: ArchConfig, rng: np.random.Generator) -> Decoder:
    check_arch(arch)
    check_modality(spec)
    decoder = Decoder(spec, arch, rng)
    logger.debug("built %s (%s) with %d parameters", decoder.name, spec.decoder_side_info.name,
                 sum(p.size for p in decoder.parameters()))
    return decoder


def decode(dec: Decoder, latent: Tensor, side: Optional[EncoderOutput] = None, mode: Mode = Mode.eval) -> Tensor:
    return dec(latent, side, mode)
