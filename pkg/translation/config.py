RGB = "R"
DEPTH = "D"
SEGMENTATION = "S"

LAMBDA_R = 1.0
LAMBDA_S = 100.0
LAMBDA_D = 10.0
LAMBDA_A = 1.0
LAMBDA_L2 = 1.0
# second phase: heavier RGB, latent and L2 weights with the RGB encoder frozen
LAMBDA_R_PHASE2 = 10.0
LAMBDA_A_PHASE2 = 10.0
LAMBDA_L2_PHASE2 = 10.0

LEARNING_RATE = 0.0002
ADAM_BETA1 = 0.5
ADAM_BETA2 = 0.999
NOISE_SIGMA = 0.5

DESK_ITERATIONS = 3000
DESK_BATCH_SIZE = 8
FULL_ITERATIONS = 200_000
FULL_BATCH_SIZE = 6

LOG_INTERVAL = 100
VAL_SIZE = 16
FUSION_ALPHA = 0.2

TERMS = ("SR", "DR", "RR", "GAN", "RD", "DD", "RS", "SS", "LAT")
AUTOENCODER_TERMS = ("RR", "DD", "SS")

CSV_FLOAT_FORMAT = "%.8g"
GRAPH_FILE = "graph.json"
CHECKPOINT_SUFFIX = ".ckpt"
