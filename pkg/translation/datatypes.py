import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from numpy.typing import NDArray

from networks import SideInfoMode

from .config import (LAMBDA_R, LAMBDA_S, LAMBDA_D, LAMBDA_A, LAMBDA_L2, LAMBDA_R_PHASE2, LAMBDA_A_PHASE2,
                     LAMBDA_L2_PHASE2, LEARNING_RATE, ADAM_BETA1, ADAM_BETA2, NOISE_SIGMA, DESK_ITERATIONS,
                     DESK_BATCH_SIZE, FULL_ITERATIONS, FULL_BATCH_SIZE, LOG_INTERVAL, VAL_SIZE, FUSION_ALPHA, RGB,
                     DEPTH)


class Strategy(Enum):
    mixmatch_anchor = "mixmatch_anchor"
    pairwise = "pairwise"


class IndexSource(Enum):
    """Modality whose encoder provides side information to a fused decode."""
    rgb = RGB
    depth = DEPTH


@dataclass
class LossWeights:
    lambda_R: float = LAMBDA_R
    lambda_S: float = LAMBDA_S
    lambda_D: float = LAMBDA_D
    lambda_A: float = LAMBDA_A
    lambda_L2: float = LAMBDA_L2

    @classmethod
    def phase2(cls) -> "LossWeights":
        return cls(lambda_R=LAMBDA_R_PHASE2, lambda_A=LAMBDA_A_PHASE2, lambda_L2=LAMBDA_L2_PHASE2)

    def term_weights(self) -> Dict[str, float]:
        rgb = self.lambda_R * self.lambda_L2
        return {"SR": rgb, "DR": rgb, "RR": rgb, "GAN": self.lambda_R,
                "RD": self.lambda_D, "DD": self.lambda_D,
                "RS": self.lambda_S, "SS": self.lambda_S,
                "LAT": self.lambda_A}


@dataclass
class TrainConfig:
    iters_phase1: int = DESK_ITERATIONS
    iters_phase2: int = DESK_ITERATIONS
    batch_size: int = DESK_BATCH_SIZE
    lr: float = LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    noise_sigma: float = NOISE_SIGMA
    seed: int = 0
    side_info_mode: SideInfoMode = SideInfoMode.pooling_indices
    autoencoders: bool = True
    latent_loss: bool = True
    noise: bool = True
    freeze_rgb_encoder_phase2: bool = True
    log_interval: int = LOG_INTERVAL
    val_size: int = VAL_SIZE
    weights_phase1: LossWeights = field(default_factory=LossWeights)
    weights_phase2: LossWeights = field(default_factory=LossWeights.phase2)

    @classmethod
    def full(cls) -> "TrainConfig":
        """Full-length schedule: 200k + 200k iterations at batch 6."""
        return cls(iters_phase1=FULL_ITERATIONS, iters_phase2=FULL_ITERATIONS, batch_size=FULL_BATCH_SIZE)

    @property
    def effective_sigma(self) -> float:
        return self.noise_sigma if self.noise else 0.0

    @property
    def total_iterations(self) -> int:
        return self.iters_phase1 + self.iters_phase2


@dataclass
class FusionSpec:
    alpha: float = FUSION_ALPHA
    index_source: IndexSource = IndexSource.rgb

    def weights(self) -> Dict[str, float]:
        return {RGB: 1.0 - self.alpha, DEPTH: self.alpha}


@dataclass
class ModuleCount:
    encoders: int
    decoders: int
    pairs: int


@dataclass
class LossBreakdown:
    """Raw and weighted loss terms of one generator step. Disabled terms are absent."""
    raw: Dict[str, float] = field(default_factory=dict)
    weights: Dict[str, float] = field(default_factory=dict)
    total: float = 0.0

    @property
    def weighted(self) -> Dict[str, float]:
        return {name: value * self.weights[name] for name, value in self.raw.items()}

    def first_nonfinite(self) -> Optional[str]:
        for name, value in self.raw.items():
            if not math.isfinite(value):
                return name
        return None

    def as_row(self) -> Dict[str, float]:
        row = {f"raw_{name}": value for name, value in self.raw.items()}
        row.update({f"weighted_{name}": value for name, value in self.weighted.items()})
        row["total"] = self.total
        return row


@dataclass
class SegBatch:
    """RGB images (B, 3, H, W) with label maps (B, H, W)."""
    rgb: NDArray
    seg: NDArray


@dataclass
class DepthBatch:
    """RGB images (B, 3, H, W) with depth maps (B, 1, H, W)."""
    rgb: NDArray
    depth: NDArray
