from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

from tensorcore import PoolingIndices, Tensor

from .config import (FULL_STAGES, FULL_RESOLUTION, FULL_DISCRIMINATOR_CHANNELS, DESK_STAGES, DESK_RESOLUTION,
                     DESK_DISCRIMINATOR_CHANNELS, KERNEL_SIZE, RGB_CHANNELS, DEPTH_CHANNELS, NUM_CLASSES)


class SideInfoMode(Enum):
    pooling_indices = "pooling_indices"
    skip_connections = "skip_connections"
    none = "none"


class LossKind(Enum):
    rgb_l2_gan = "rgb_l2_gan"
    depth_berhu = "depth_berhu"
    segmentation_ce = "segmentation_ce"


class OutputActivation(Enum):
    tanh = "tanh"
    linear = "linear"
    logits = "logits"


class UpsamplingMode(Enum):
    """Upsampling operator of decoders that receive no side information."""
    nearest = "nearest"
    transposed = "transposed"


class ScalePreset(Enum):
    full = "full"
    desk = "desk"
    custom = "custom"


@dataclass
class ArchConfig:
    stages: List[Tuple[int, int]] = field(default_factory=lambda: list(DESK_STAGES))
    input_resolution: Tuple[int, int] = DESK_RESOLUTION
    kernel_size: int = KERNEL_SIZE
    scale_preset: ScalePreset = ScalePreset.custom
    discriminator_channels: Tuple[int, ...] = DESK_DISCRIMINATOR_CHANNELS
    upsampling: UpsamplingMode = UpsamplingMode.nearest

    @classmethod
    def preset(cls, name: str) -> "ArchConfig":
        preset = ScalePreset[name]
        if preset is ScalePreset.full:
            return cls(stages=list(FULL_STAGES), input_resolution=FULL_RESOLUTION, scale_preset=preset,
                       discriminator_channels=FULL_DISCRIMINATOR_CHANNELS)
        if preset is ScalePreset.desk:
            return cls(stages=list(DESK_STAGES), input_resolution=DESK_RESOLUTION, scale_preset=preset,
                       discriminator_channels=DESK_DISCRIMINATOR_CHANNELS)
        return cls()

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    @property
    def latent_channels(self) -> int:
        return self.stages[-1][1]

    @property
    def latent_resolution(self) -> Tuple[int, int]:
        scale = 2 ** self.num_stages
        return self.input_resolution[0] // scale, self.input_resolution[1] // scale


@dataclass
class ModalitySpec:
    name: str
    channels: int
    loss_kind: LossKind
    decoder_side_info: SideInfoMode = SideInfoMode.pooling_indices
    output_activation: OutputActivation = OutputActivation.linear

    @classmethod
    def rgb(cls, name: str = "R") -> "ModalitySpec":
        return cls(name, RGB_CHANNELS, LossKind.rgb_l2_gan, SideInfoMode.none, OutputActivation.tanh)

    @classmethod
    def depth(cls, name: str = "D", side_info: SideInfoMode = SideInfoMode.pooling_indices) -> "ModalitySpec":
        return cls(name, DEPTH_CHANNELS, LossKind.depth_berhu, side_info, OutputActivation.linear)

    @classmethod
    def segmentation(cls, name: str = "S", num_classes: int = NUM_CLASSES,
                     side_info: SideInfoMode = SideInfoMode.pooling_indices) -> "ModalitySpec":
        return cls(name, num_classes, LossKind.segmentation_ce, side_info, OutputActivation.logits)


@dataclass
class EncoderOutput:
    """
    latent is what decoders consume (noisy in train mode), clean_latent is the
    same representation before noise. indices and skip_features hold one entry
    per stage, shallowest first.
    """
    latent: Tensor
    clean_latent: Tensor
    indices: List[PoolingIndices]
    skip_features: List[Tensor]

    @property
    def num_stages(self) -> int:
        return len(self.indices)
