import numpy as np

DEFAULT_DTYPE = np.float32
GRADCHECK_DTYPE = np.float64
BATCHNORM_EPS = 1e-5
BATCHNORM_MOMENTUM = 0.1
LEAKY_SLOPE = 0.2
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
GRADCHECK_EPS = 1e-6
CHECKPOINT_MAGIC = b"MMCK"
CHECKPOINT_VERSION = 1
