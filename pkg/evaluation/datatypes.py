import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from numpy.typing import NDArray


@dataclass
class SegMetrics:
    confusion: NDArray
    per_class_iou: List[float]
    miou: float
    global_accuracy: float

    def as_dict(self) -> Dict:
        return {"miou": self.miou, "global_accuracy": self.global_accuracy,
                "per_class_iou": [None if math.isnan(iou) else iou for iou in self.per_class_iou]}


@dataclass
class DepthMetrics:
    delta1: float
    delta2: float
    delta3: float
    rmse_lin: float
    rmse_log: float
    abs_rel: float = 0.0
    sq_rel: float = 0.0

    def as_dict(self) -> Dict:
        return {"delta1": self.delta1, "delta2": self.delta2, "delta3": self.delta3, "rmse_lin": self.rmse_lin,
                "rmse_log": self.rmse_log, "abs_rel": self.abs_rel, "sq_rel": self.sq_rel}


@dataclass
class ExperimentRow:
    """One evaluated translation of one configuration and seed."""
    experiment: str
    variant: str
    seed: int
    translation: str
    miou: Optional[float] = None
    global_accuracy: Optional[float] = None
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    delta3: Optional[float] = None
    rmse_lin: Optional[float] = None
    rmse_log: Optional[float] = None
    per_class_iou: List[Optional[float]] = field(default_factory=list)


@dataclass
class ExperimentReport:
    name: str
    seeds: List[int]
    rows: List[ExperimentRow] = field(default_factory=list)
    medians: List[Dict] = field(default_factory=list)
