import numpy as np
from numpy.typing import NDArray

from tensorcore import DimensionError, ParameterError

from .config import MIN_DEPTH_CLIP, DELTA_BASE
from .datatypes import DepthMetrics, SegMetrics


def confusion_matrix(pred_labels: NDArray, gt_labels: NDArray, num_classes: int) -> NDArray:
    """Rows are ground-truth classes, columns predicted classes."""
    pred = np.asarray(pred_labels).astype(np.int64).reshape(-1)
    gt = np.asarray(gt_labels).astype(np.int64).reshape(-1)
    for what, labels in (("prediction", pred), ("ground truth", gt)):
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise ParameterError(f"{what} labels must lie in [0, {num_classes})")
    return np.bincount(gt * num_classes + pred, minlength=num_classes * num_classes).reshape(num_classes,
                                                                                           num_classes)


def seg_metrics(pred_labels: NDArray, gt_labels: NDArray, num_classes: int) -> SegMetrics:
    """
    IoU_c = TP / (TP + FP + FN) per class. Classes absent from both prediction
    and ground truth get IoU NaN and are left out of the mean.
    """
    if np.shape(pred_labels) != np.shape(gt_labels):
        raise DimensionError(f"prediction shape {np.shape(pred_labels)} differs from ground truth "
                             f"{np.shape(gt_labels)}")
    confusion = confusion_matrix(pred_labels, gt_labels, num_classes)
    tp = np.diag(confusion).astype(np.float64)
    union = confusion.sum(axis=0) + confusion.sum(axis=1) - tp
    with np.errstate(invalid="ignore", divide="ignore"):
        iou = np.where(union > 0, tp / union, np.nan)
    present = union > 0
    miou = float(iou[present].mean()) if present.any() else 0.0
    total = confusion.sum()
    global_accuracy = float(tp.sum() / total) if total else 0.0
    return SegMetrics(confusion=confusion, per_class_iou=iou.tolist(), miou=miou, global_accuracy=global_accuracy)


def depth_metrics(pred: NDArray, gt: NDArray, min_depth_clip: float = MIN_DEPTH_CLIP) -> DepthMetrics:
    """
    Threshold accuracies and errors for depth maps. Ratios and logarithms use
    values clipped below at min_depth_clip; the linear errors use raw values.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DimensionError(f"prediction shape {pred.shape} differs from ground truth {gt.shape}")
    if min_depth_clip <= 0:
        raise ParameterError(f"min_depth_clip must be positive, got {min_depth_clip}")
    pred_c = np.maximum(pred, min_depth_clip)
    gt_c = np.maximum(gt, min_depth_clip)
    thresh = np.maximum(gt_c / pred_c, pred_c / gt_c)
    return DepthMetrics(delta1=float((thresh < DELTA_BASE).mean()),
                        delta2=float((thresh < DELTA_BASE ** 2).mean()),
                        delta3=float((thresh < DELTA_BASE ** 3).mean()),
                        rmse_lin=float(np.sqrt(((pred - gt) ** 2).mean())),
                        rmse_log=float(np.sqrt(((np.log(pred_c) - np.log(gt_c)) ** 2).mean())),
                        abs_rel=float(np.mean(np.abs(gt_c - pred_c) / gt_c)),
                        sq_rel=float(np.mean((gt_c - pred_c) ** 2 / gt_c)))
