"""
Experiment harness: trains the configured graph variants over several seeds
and scores zero-pair, cascaded, seen and fused translations on D3.
"""
import json
import logging
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from networks import SideInfoMode
from scenes import DepthSegSplit, RgbDepthSplit, RgbSegSplit, TripletSplit, make_eval_triplets, make_splits
from tensorcore import ConfigError
from translation import (TrainConfig, TranslationGraph, build_mixmatch_graph, compose, compose_cascade,
                         compose_fusion, load_graph, save_graph, train)
from translation.config import RGB, DEPTH, SEGMENTATION, GRAPH_FILE

from .config import ABLATION_GRID, EXPERIMENTS, REPORT_FILE, ROWS_FILE, TRAIN_REPORT_FILE, CSV_FLOAT_FORMAT
from .datatypes import ExperimentReport, ExperimentRow
from .metrics import depth_metrics, seg_metrics
from .settings import RunConfig

logger = logging.getLogger(__name__)

METRIC_FIELDS = ("miou", "global_accuracy", "delta1", "delta2", "delta3", "rmse_lin", "rmse_log")
SIDE_INFO_VARIANTS = (("none", SideInfoMode.none), ("skip", SideInfoMode.skip_connections),
                      ("pooling", SideInfoMode.pooling_indices))


@dataclass
class ExperimentData:
    d1: RgbSegSplit
    d2: RgbDepthSplit
    d3: DepthSegSplit
    triplets: TripletSplit

    @classmethod
    def generate(cls, cfg: RunConfig) -> "ExperimentData":
        d1, d2, d3 = make_splits(cfg.split)
        return cls(d1, d2, d3, make_eval_triplets(cfg.split))


def ablation_name(flags: Tuple[bool, bool, bool]) -> str:
    return "".join("Y" if flag else "N" for flag in flags)


def experiment_variants(name: str) -> List[Tuple[str, Dict]]:
    """(variant name, TrainConfig overrides) rows of one experiment."""
    if name == "ablation":
        return [(ablation_name(flags), dict(autoencoders=flags[0], latent_loss=flags[1], noise=flags[2]))
                for flags in ABLATION_GRID]
    if name == "sidesweep":
        return [(label, dict(side_info_mode=mode)) for label, mode in SIDE_INFO_VARIANTS]
    return [("full", {})]


def train_variant(cfg: RunConfig, data: ExperimentData, train_cfg: TrainConfig, checkpoint_dir: Optional[Path] = None
                  ) -> TranslationGraph:
    """Train one graph, or reload it when checkpoint_dir already holds one."""
    if checkpoint_dir is not None and (checkpoint_dir / GRAPH_FILE).exists():
        logger.info("loading trained graph from %s", checkpoint_dir)
        return load_graph(checkpoint_dir)
    graph = build_mixmatch_graph(cfg.arch, cfg.split.num_classes, train_cfg.side_info_mode, train_cfg.seed,
                                 autoencoders=train_cfg.autoencoders)
    report = train(graph, data.d1, data.d2, train_cfg)
    if checkpoint_dir is not None:
        save_graph(graph, checkpoint_dir)
        report.save_csv(checkpoint_dir / TRAIN_REPORT_FILE)
    return graph


def _seg_row(row: ExperimentRow, pred: np.ndarray, gt: np.ndarray, num_classes: int) -> ExperimentRow:
    metrics = seg_metrics(pred, gt, num_classes)
    row.miou, row.global_accuracy = metrics.miou, metrics.global_accuracy
    row.per_class_iou = metrics.as_dict()["per_class_iou"]
    return row


def _depth_row(row: ExperimentRow, pred: np.ndarray, gt: np.ndarray) -> ExperimentRow:
    metrics = depth_metrics(pred, gt)
    for key in ("delta1", "delta2", "delta3", "rmse_lin", "rmse_log"):
        setattr(row, key, getattr(metrics, key))
    return row


def evaluate_translations(name: str, variant: str, seed: int, graph: TranslationGraph, data: ExperimentData,
                          cfg: RunConfig) -> List[ExperimentRow]:
    """Score the translations that experiment name reports, on D3."""
    num_classes = cfg.split.num_classes
    d3, triplets = data.d3, data.triplets

    def seg(label: str, pred: np.ndarray) -> ExperimentRow:
        return _seg_row(ExperimentRow(name, variant, seed, label), pred, d3.seg, num_classes)

    def depth(label: str, pred: np.ndarray) -> ExperimentRow:
        return _depth_row(ExperimentRow(name, variant, seed, label), pred, d3.depth)

    rows = [seg("D->S", compose(graph, DEPTH, SEGMENTATION).predict(d3.depth))]
    if name in ("ablation", "sidesweep"):
        return rows
    if name == "multimodal":
        rows.append(seg("R->S", compose(graph, RGB, SEGMENTATION).predict(triplets.rgb)))
        fused = compose_fusion(graph, SEGMENTATION, cfg.fusion)
        rows.append(seg("(R,D)->S", fused.predict({RGB: triplets.rgb, DEPTH: triplets.depth})))
        return rows
    rows.append(depth("S->D", compose(graph, SEGMENTATION, DEPTH).predict(d3.seg)))
    if name == "cascade_baseline":
        rows.append(seg("D->R->S", compose_cascade(graph, [DEPTH, RGB, SEGMENTATION]).predict(d3.depth)))
        rows.append(depth("S->R->D", compose_cascade(graph, [SEGMENTATION, RGB, DEPTH]).predict(d3.seg)))
    else:
        rows.append(seg("R->S", compose(graph, RGB, SEGMENTATION).predict(triplets.rgb)))
        rows.append(depth("R->D", compose(graph, RGB, DEPTH).predict(triplets.rgb)))
    return rows


def median_rows(rows: List[ExperimentRow]) -> List[Dict]:
    frame = pd.DataFrame([asdict(r) for r in rows]).drop(columns=["per_class_iou"])
    order = list(dict.fromkeys(zip(frame["variant"], frame["translation"])))
    medians = []
    for variant, translation in order:
        group = frame[(frame["variant"] == variant) & (frame["translation"] == translation)]
        entry = {"variant": variant, "translation": translation}
        for key in METRIC_FIELDS:
            values = group[key].dropna()
            if len(values):
                entry[key] = float(np.median(values.to_numpy(dtype=np.float64)))
        medians.append(entry)
    return medians


def run_experiment(name: str, cfg: RunConfig, data: Optional[ExperimentData] = None,
                   out_dir: Union[str, Path, None] = None) -> ExperimentReport:
    """
    Train every variant of the experiment for each seed in cfg.seeds, evaluate
    on D3 and aggregate medians. With out_dir, checkpoints, training curves and
    the report (JSON plus CSV rows) are written there, and existing checkpoints
    are reused.
    """
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{name}', expected one of {list(EXPERIMENTS)}")
    data = ExperimentData.generate(cfg) if data is None else data
    out_dir = None if out_dir is None else Path(out_dir)
    report = ExperimentReport(name=name, seeds=list(cfg.seeds))
    for variant, overrides in experiment_variants(name):
        for seed in cfg.seeds:
            train_cfg = replace(cfg.train, seed=seed, **overrides)
            logger.info("experiment %s: variant %s, seed %d", name, variant, seed)
            checkpoint_dir = None if out_dir is None else out_dir / f"{variant}_seed{seed}"
            graph = train_variant(cfg, data, train_cfg, checkpoint_dir)
            report.rows.extend(evaluate_translations(name, variant, seed, graph, data, cfg))
    report.medians = median_rows(report.rows)
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def write_report(report: ExperimentReport, out_dir: Union[str, Path]) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / REPORT_FILE, "w") as f:
        json.dump(asdict(report), f, indent=2, sort_keys=True)
    frame = pd.DataFrame([asdict(r) for r in report.rows]).drop(columns=["per_class_iou"])
    frame.to_csv(out_dir / ROWS_FILE, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("wrote %s report to %s", report.name, out_dir)


def median_of(report: ExperimentReport, variant: str, translation: str, metric: str) -> float:
    for entry in report.medians:
        if entry["variant"] == variant and entry["translation"] == translation:
            return entry[metric]
    raise KeyError(f"no median for {variant} {translation}")
