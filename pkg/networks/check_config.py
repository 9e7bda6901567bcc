from tensorcore import ConfigError

from .config import MAX_NUM_CLASSES
from .datatypes import ArchConfig, ModalitySpec, LossKind, SideInfoMode, OutputActivation


def check_arch(arch: ArchConfig):
    if not arch.stages:
        raise ConfigError('Architecture needs at least one stage')
    for num_convs, channels in arch.stages:
        if num_convs < 1:
            raise ConfigError('Every stage needs at least one convolution')
        if channels < 1:
            raise ConfigError('Stage channels must be strictly positive')
    if arch.kernel_size < 1 or arch.kernel_size % 2 == 0:
        raise ConfigError('Kernel size must be a positive odd number')
    scale = 2 ** arch.num_stages
    height, width = arch.input_resolution
    if height % scale or width % scale:
        raise ConfigError(f'Input resolution {height}x{width} is not divisible by 2^{arch.num_stages}')
    if any(c < 1 for c in arch.discriminator_channels) or not arch.discriminator_channels:
        raise ConfigError('Discriminator channels must be strictly positive')


def check_modality(spec: ModalitySpec):
    if spec.channels < 1:
        raise ConfigError(f'Modality {spec.name} needs at least one channel')
    if spec.loss_kind is LossKind.rgb_l2_gan:
        if spec.decoder_side_info is not SideInfoMode.none:
            raise ConfigError('The RGB decoder does not take side information')
        if spec.output_activation is not OutputActivation.tanh:
            raise ConfigError('The RGB decoder must use a tanh output')
    if spec.loss_kind is LossKind.segmentation_ce:
        if spec.output_activation is not OutputActivation.logits:
            raise ConfigError('The segmentation decoder must output logits')
        if not 2 <= spec.channels <= MAX_NUM_CLASSES:
            raise ConfigError(f'Segmentation needs between 2 and {MAX_NUM_CLASSES} classes')
