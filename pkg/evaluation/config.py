MIN_DEPTH_CLIP = 1e-3
DELTA_BASE = 1.25

EXPERIMENTS = ("zero_pair", "cascade_baseline", "multimodal", "ablation", "sidesweep")
# (autoencoders, latent_loss, noise) rows of the component ablation
ABLATION_GRID = ((False, False, False), (True, False, False), (True, True, False), (True, True, True))
SWEEP_ALPHAS = tuple(round(0.1 * k, 1) for k in range(11))

REPORT_FILE = "report.json"
ROWS_FILE = "rows.csv"
SWEEP_FILE = "alpha_sweep.csv"
PLOT_FILE = "alpha_sweep.svg"
TRAIN_REPORT_FILE = "train_report.csv"
CSV_FLOAT_FORMAT = "%.8g"

PLOT_COLORS = {"rgb": "#1e3769", "depth": "#156da2"}

DATASET_FILES = {"D1": "d1.mmds", "D2": "d2.mmds", "D3": "d3.mmds"}
CHECKPOINT_DIR = "checkpoints"
PREDICTIONS_FILE = "predictions.npz"
GRADCHECK_FILE = "gradcheck.csv"
DEFAULT_OUT_DIR = "mixmatch_out"
