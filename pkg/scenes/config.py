DEFAULT_RESOLUTION = (32, 32)
MIN_RESOLUTION = 16
NUM_CLASSES = 8
MAX_NUM_CLASSES = 14
MIN_PRIMITIVES = 3
MAX_PRIMITIVES = 6

# scene seeds of split k are seed * SEED_STRIDE + running index
SEED_STRIDE = 1_000_000

BACKGROUND_CLASS = 0
BACKGROUND_DEPTH = 1.0
NEAREST_LAYER = 0.2
FARTHEST_LAYER = 0.85
LAYER_JITTER = 0.01
DEPTH_GRADIENT = 0.025
MIN_HALF_EXTENT = 0.12
MAX_HALF_EXTENT = 0.3
COLOR_JITTER = 0.12

# base colours in [-1, 1]; classes k and k + len(PALETTE) share a colour and
# differ only in shape and depth structure
PALETTE = (
    (0.8, -0.6, -0.6),
    (-0.6, 0.7, -0.5),
    (-0.5, -0.4, 0.8),
    (0.7, 0.6, -0.7),
    (-0.6, 0.6, 0.7),
)
BACKGROUND_COLOR = (0.0, 0.0, 0.0)

DATASET_MAGIC = b"MMDS"
DATASET_VERSION = 2
