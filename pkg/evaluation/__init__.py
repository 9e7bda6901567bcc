from .datatypes import SegMetrics, DepthMetrics, ExperimentRow, ExperimentReport
from .metrics import seg_metrics, depth_metrics, confusion_matrix
