from dataclasses import dataclass, replace
from enum import Enum
from typing import ClassVar, Dict, Tuple

import numpy as np
from numpy.typing import NDArray

from .config import DEFAULT_RESOLUTION, NUM_CLASSES, MIN_PRIMITIVES, MAX_PRIMITIVES


class ShapeKind(Enum):
    rectangle = "rectangle"
    ellipse = "ellipse"


class GradientKind(Enum):
    """Direction in which depth varies inside an object."""
    horizontal = "horizontal"
    vertical = "vertical"
    radial = "radial"


@dataclass
class SplitSpec:
    n_d1: int = 400
    n_d2: int = 400
    n_d3: int = 100
    seed: int = 0
    num_classes: int = NUM_CLASSES
    resolution: Tuple[int, int] = DEFAULT_RESOLUTION
    min_primitives: int = MIN_PRIMITIVES
    max_primitives: int = MAX_PRIMITIVES


@dataclass
class Primitive:
    class_id: int
    shape: ShapeKind
    gradient: GradientKind
    center: Tuple[float, float]
    half_extent: Tuple[float, float]
    layer_depth: float
    color: Tuple[float, float, float]


@dataclass
class SceneTriplet:
    """rgb (3, H, W) in [-1, 1], depth (1, H, W) in [0, 1], seg (H, W) class ids."""
    seed: int
    rgb: NDArray
    depth: NDArray
    seg: NDArray


@dataclass
class Split:
    """A set of scenes exposing only the modalities listed in FIELDS, stacked along axis 0."""
    name: str
    spec: SplitSpec
    seeds: NDArray

    FIELDS: ClassVar[Tuple[str, ...]] = ()
    KIND: ClassVar[str] = ""

    def __len__(self) -> int:
        return len(self.seeds)

    def arrays(self) -> Dict[str, NDArray]:
        return {name: getattr(self, name) for name in self.FIELDS}

    def take(self, indices) -> "Split":
        indices = np.asarray(indices, dtype=np.int64)
        return replace(self, seeds=self.seeds[indices], **{k: v[indices] for k, v in self.arrays().items()})


@dataclass
class RgbSegSplit(Split):
    rgb: NDArray = None
    seg: NDArray = None

    FIELDS: ClassVar[Tuple[str, ...]] = ("rgb", "seg")
    KIND: ClassVar[str] = "rgb_seg"


@dataclass
class RgbDepthSplit(Split):
    rgb: NDArray = None
    depth: NDArray = None

    FIELDS: ClassVar[Tuple[str, ...]] = ("rgb", "depth")
    KIND: ClassVar[str] = "rgb_depth"


@dataclass
class DepthSegSplit(Split):
    depth: NDArray = None
    seg: NDArray = None

    FIELDS: ClassVar[Tuple[str, ...]] = ("depth", "seg")
    KIND: ClassVar[str] = "depth_seg"


@dataclass
class TripletSplit(Split):
    rgb: NDArray = None
    depth: NDArray = None
    seg: NDArray = None

    FIELDS: ClassVar[Tuple[str, ...]] = ("rgb", "depth", "seg")
    KIND: ClassVar[str] = "triplet"


SPLIT_KINDS = {cls.KIND: cls for cls in (RgbSegSplit, RgbDepthSplit, DepthSegSplit, TripletSplit)}
FIELD_DTYPES = {"rgb": np.dtype("<f4"), "depth": np.dtype("<f4"), "seg": np.dtype("u1")}
