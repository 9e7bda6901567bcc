from .datatypes import (ArchConfig, ModalitySpec, EncoderOutput, SideInfoMode, LossKind, OutputActivation,
                        UpsamplingMode, ScalePreset)
from .layers import Network
from .encoder import Encoder, build_encoder, encode
from .decoder import Decoder, build_decoder, decode
from .discriminator import Discriminator, build_discriminator, discriminate
