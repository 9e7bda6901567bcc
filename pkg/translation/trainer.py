import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from evaluation.metrics import depth_metrics, seg_metrics
from scenes import RgbDepthSplit, RgbSegSplit
from tensorcore import Adam, ConfigError, Mode, Tape, TrainingDivergedError

from .check_config import check_train_config
from .config import RGB, DEPTH, SEGMENTATION
from .datatypes import DepthBatch, LossBreakdown, SegBatch, TrainConfig
from .graph import TranslationGraph, compose
from .losses import discriminator_loss, generator_pass
from .report import TrainingReport

logger = logging.getLogger(__name__)

Callback = Callable[[int, LossBreakdown, Dict], None]


def holdout(split, val_size: int):
    """Split off the last items for validation, keeping at least three quarters for training."""
    n_val = min(val_size, len(split) // 4)
    n_train = len(split) - n_val
    return split.take(np.arange(n_train)), split.take(np.arange(n_train, len(split)))


class Trainer:
    """
    Joint training on the (RGB, segmentation) set D1 and the (RGB, depth) set D2.

    Every iteration draws one batch from each set, takes one generator step on
    the combined loss and one discriminator step on real against generated RGB.
    The second phase switches to the phase-2 weights and, if configured, freezes
    the RGB encoder (its parameters and its batchnorm statistics).
    """

    def __init__(self, graph: TranslationGraph, d1: RgbSegSplit, d2: RgbDepthSplit, cfg: TrainConfig,
                 callbacks: Sequence[Callback] = ()):
        check_train_config(cfg)
        graph.validate_training_pairs()
        if len(d1) == 0 or len(d2) == 0:
            raise ConfigError(f"training needs non-empty D1 and D2, got {len(d1)} and {len(d2)} items")
        if graph.discriminator is None:
            graph.add_discriminator()
        self.graph = graph
        self.cfg = cfg
        self.callbacks = list(callbacks)
        self.train_d1, self.val_d1 = holdout(d1, cfg.val_size)
        self.train_d2, self.val_d2 = holdout(d2, cfg.val_size)
        self.sample_rng = np.random.default_rng([cfg.seed, 1])
        self.noise_rng = np.random.default_rng([cfg.seed, 2])
        generator = [p for name in graph.modalities for net in (graph.encoders[name], graph.decoders[name])
                     for p in net.parameters()]
        self.g_optimizer = Adam(generator, cfg.lr, cfg.beta1, cfg.beta2)
        self.d_optimizer = Adam(graph.discriminator.parameters(), cfg.lr, cfg.beta1, cfg.beta2)
        self.report = TrainingReport()

    def _draw(self, split, size: int) -> np.ndarray:
        n = len(split)
        return self.sample_rng.choice(n, size=size, replace=n < size)

    def next_batches(self) -> Tuple[SegBatch, DepthBatch]:
        i1 = self._draw(self.train_d1, self.cfg.batch_size)
        i2 = self._draw(self.train_d2, self.cfg.batch_size)
        return (SegBatch(rgb=self.train_d1.rgb[i1], seg=self.train_d1.seg[i1]),
                DepthBatch(rgb=self.train_d2.rgb[i2], depth=self.train_d2.depth[i2]))

    def enter_phase2(self) -> None:
        logger.debug("entering phase 2 (freeze RGB encoder: %s)", self.cfg.freeze_rgb_encoder_phase2)
        if self.cfg.freeze_rgb_encoder_phase2:
            self.graph.encoders[RGB].freeze()

    def step(self, iteration: int, phase: int) -> Tuple[LossBreakdown, float]:
        weights = self.cfg.weights_phase1 if phase == 1 else self.cfg.weights_phase2
        batch_d1, batch_d2 = self.next_batches()

        self.g_optimizer.zero_grad()
        with Tape() as tape:
            result = generator_pass(batch_d1, batch_d2, self.graph, weights, Mode.train, self.cfg, self.noise_rng)
        bad = result.breakdown.first_nonfinite()
        if bad is not None:
            raise TrainingDivergedError(bad, iteration)
        tape.backward(result.total)
        self.g_optimizer.step()

        self.d_optimizer.zero_grad()
        real = np.concatenate([batch_d1.rgb, batch_d2.rgb], axis=0)
        with Tape() as tape:
            d_loss = discriminator_loss(self.graph, real, result.fake_rgb, Mode.train)
        if not math.isfinite(d_loss.item()):
            raise TrainingDivergedError("D_GAN", iteration)
        tape.backward(d_loss)
        self.d_optimizer.step()
        return result.breakdown, d_loss.item()

    def validate(self) -> Tuple[Optional[float], Optional[float]]:
        """Seen translations only: R->S on held-out D1 and R->D on held-out D2."""
        miou = rmse = None
        if len(self.val_d1):
            pred = compose(self.graph, RGB, SEGMENTATION).predict(self.val_d1.rgb)
            miou = seg_metrics(pred, self.val_d1.seg, self.graph.modalities[SEGMENTATION].channels).miou
        if len(self.val_d2):
            pred = compose(self.graph, RGB, DEPTH).predict(self.val_d2.rgb)
            rmse = depth_metrics(pred, self.val_d2.depth).rmse_lin
        return miou, rmse

    def run(self) -> TrainingReport:
        cfg = self.cfg
        total = cfg.total_iterations
        logger.info("training %d + %d iterations, batch %d, side info %s", cfg.iters_phase1, cfg.iters_phase2,
                    cfg.batch_size, cfg.side_info_mode.name)
        for iteration in range(total):
            phase = 1 if iteration < cfg.iters_phase1 else 2
            if iteration == cfg.iters_phase1:
                self.enter_phase2()
            breakdown, d_loss = self.step(iteration, phase)
            if (iteration + 1) % cfg.log_interval == 0 or iteration == total - 1:
                miou, rmse = self.validate()
                row = {"iteration": iteration + 1, "phase": phase, **breakdown.as_row(), "d_loss": d_loss,
                       "val_miou": miou, "val_rmse": rmse}
                self.report.append(row)
                logger.info("iter %d phase %d loss %.4f val mIoU %s val RMSE %s", iteration + 1, phase,
                            breakdown.total, "n/a" if miou is None else f"{miou:.3f}",
                            "n/a" if rmse is None else f"{rmse:.4f}")
                for callback in self.callbacks:
                    callback(iteration + 1, breakdown, row)
        return self.report


def train(g: TranslationGraph, d1: RgbSegSplit, d2: RgbDepthSplit, cfg: TrainConfig,
          callbacks: Sequence[Callback] = ()) -> TrainingReport:
    return Trainer(g, d1, d2, cfg, callbacks).run()
