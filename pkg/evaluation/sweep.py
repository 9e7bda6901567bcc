import logging
from typing import Sequence

import pandas as pd

from scenes import TripletSplit
from tensorcore import ParameterError
from translation import FusionSpec, IndexSource, TranslationGraph, compose_fusion
from translation.config import RGB, DEPTH, SEGMENTATION

from .config import CSV_FLOAT_FORMAT, SWEEP_ALPHAS
from .metrics import seg_metrics

logger = logging.getLogger(__name__)


def alpha_sweep(g: TranslationGraph, d3: TripletSplit, alphas: Sequence[float] = SWEEP_ALPHAS,
                index_sources: Sequence[IndexSource] = (IndexSource.rgb, IndexSource.depth)) -> pd.DataFrame:
    """
    mIoU of the fused (RGB, depth) -> segmentation translation for every
    (index source, alpha) grid point, one row per point.
    """
    bad = [a for a in alphas if not 0.0 <= a <= 1.0]
    if bad:
        raise ParameterError(f"alpha values must lie in [0, 1], got {bad}")
    num_classes = g.modalities[SEGMENTATION].channels
    rows = []
    for source in index_sources:
        for alpha in alphas:
            translator = compose_fusion(g, SEGMENTATION, FusionSpec(alpha=float(alpha), index_source=source))
            pred = translator.predict({RGB: d3.rgb, DEPTH: d3.depth})
            metrics = seg_metrics(pred, d3.seg, num_classes)
            rows.append({"index_source": source.name, "alpha": float(alpha), "miou": metrics.miou,
                         "global_accuracy": metrics.global_accuracy})
            logger.debug("alpha %.2f source %s: mIoU %.4f", alpha, source.name, metrics.miou)
    return pd.DataFrame(rows, columns=["index_source", "alpha", "miou", "global_accuracy"])


def save_sweep(curve: pd.DataFrame, path) -> None:
    curve.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("wrote alpha sweep (%d points) to %s", len(curve), path)
