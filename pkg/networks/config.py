FULL_STAGES = [(2, 64), (2, 128), (3, 256), (3, 512), (3, 512)]
FULL_RESOLUTION = (256, 256)
FULL_DISCRIMINATOR_CHANNELS = (64, 128, 256, 512)

DESK_STAGES = [(2, 16), (2, 32), (2, 64)]
DESK_RESOLUTION = (32, 32)
DESK_DISCRIMINATOR_CHANNELS = (16, 32, 64)

KERNEL_SIZE = 3
DISCRIMINATOR_KERNEL = 5
TRANSPOSED_KERNEL = 5

RGB_CHANNELS = 3
DEPTH_CHANNELS = 1
NUM_CLASSES = 8
MAX_NUM_CLASSES = 14
