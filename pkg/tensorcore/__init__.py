from .datatypes import AdamState, BatchNormState, Mode, PoolingIndices
from .errors import (MixMatchError, ConfigError, DimensionError, ParameterError, ContractError, CompositionError,
                     ProtocolError, DatasetFormatError, TrainingDivergedError)
from .tensor import Tape, Tensor, Parameter, Function
from .functional import (conv2d, conv2d_transpose, maxpool2_indices, maxunpool2, upsample_nearest2, batchnorm, relu,
                         leaky_relu, tanh, concat, add_gaussian_noise, weighted_sum, berhu, softmax_cross_entropy)
from .optim import Adam, adam_step
from .gradcheck import grad_check
from .iofile import save_arrays, load_arrays
