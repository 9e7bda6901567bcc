"""
Procedural tri-modal scenes: layered rectangles and ellipses over a flat
background, rendered consistently into colour, depth and class maps.
"""
import logging
from typing import List, Tuple

import numpy as np
from numpy.typing import NDArray

from .check_config import check_split_spec
from .config import (SEED_STRIDE, BACKGROUND_CLASS, BACKGROUND_DEPTH, NEAREST_LAYER, FARTHEST_LAYER, LAYER_JITTER,
                     DEPTH_GRADIENT, MIN_HALF_EXTENT, MAX_HALF_EXTENT, COLOR_JITTER, PALETTE, BACKGROUND_COLOR)
from .datatypes import (GradientKind, Primitive, RgbDepthSplit, RgbSegSplit, DepthSegSplit, SceneTriplet, ShapeKind,
                        SplitSpec, TripletSplit)

logger = logging.getLogger(__name__)

SHAPES = (ShapeKind.rectangle, ShapeKind.ellipse)
GRADIENTS = (GradientKind.horizontal, GradientKind.vertical, GradientKind.radial)


def class_shape(class_id: int) -> ShapeKind:
    return SHAPES[class_id % len(SHAPES)]


def class_gradient(class_id: int) -> GradientKind:
    return GRADIENTS[class_id % len(GRADIENTS)]


def class_color(class_id: int) -> Tuple[float, float, float]:
    return PALETTE[(class_id - 1) % len(PALETTE)]


def sample_primitives(rng: np.random.Generator, spec: SplitSpec) -> List[Primitive]:
    """Primitives ordered far to near."""
    count = int(rng.integers(spec.min_primitives, spec.max_primitives + 1))
    if count == 0:
        return []
    if count == 1:
        layers = rng.uniform(NEAREST_LAYER, FARTHEST_LAYER, size=1)
    else:
        layers = np.linspace(FARTHEST_LAYER, NEAREST_LAYER, count) + rng.uniform(-LAYER_JITTER, LAYER_JITTER, count)
    primitives = []
    for layer in layers:
        class_id = int(rng.integers(1, spec.num_classes))
        jitter = rng.normal(0.0, COLOR_JITTER, size=3)
        color = tuple(np.clip(np.array(class_color(class_id)) + jitter, -1.0, 1.0).tolist())
        primitives.append(Primitive(class_id=class_id,
                                    shape=class_shape(class_id),
                                    gradient=class_gradient(class_id),
                                    center=tuple(rng.uniform(0.1, 0.9, size=2).tolist()),
                                    half_extent=tuple(rng.uniform(MIN_HALF_EXTENT, MAX_HALF_EXTENT, size=2).tolist()),
                                    layer_depth=float(layer),
                                    color=color))
    return primitives


def _shape_mask(primitive: Primitive, yy: NDArray, xx: NDArray) -> Tuple[NDArray, NDArray]:
    """Boolean coverage mask and normalised offsets (dy, dx) in [-1, 1] inside the shape."""
    (cy, cx), (hy, hx) = primitive.center, primitive.half_extent
    dy, dx = (yy - cy) / hy, (xx - cx) / hx
    if primitive.shape is ShapeKind.rectangle:
        mask = (np.abs(dy) <= 1.0) & (np.abs(dx) <= 1.0)
    else:
        mask = dy * dy + dx * dx <= 1.0
    return mask, np.stack([dy, dx])


def _object_depth(primitive: Primitive, offsets: NDArray) -> NDArray:
    dy, dx = offsets
    if primitive.gradient is GradientKind.horizontal:
        ramp = np.clip(dx, -1.0, 1.0)
    elif primitive.gradient is GradientKind.vertical:
        ramp = np.clip(dy, -1.0, 1.0)
    else:
        ramp = np.clip(2.0 * np.sqrt(dy * dy + dx * dx) - 1.0, -1.0, 1.0)
    return primitive.layer_depth + DEPTH_GRADIENT * ramp


def render(primitives: List[Primitive], resolution: Tuple[int, int], background_color=BACKGROUND_COLOR
           ) -> Tuple[NDArray, NDArray, NDArray]:
    """Painter's algorithm: primitives are drawn far to near so nearer ones occlude."""
    height, width = resolution
    yy, xx = np.mgrid[0:height, 0:width]
    yy = (yy + 0.5) / height
    xx = (xx + 0.5) / width
    seg = np.full((height, width), BACKGROUND_CLASS, dtype=np.uint8)
    depth = np.full((height, width), BACKGROUND_DEPTH, dtype=np.float64)
    albedo = np.empty((3, height, width), dtype=np.float64)
    albedo[...] = np.asarray(background_color).reshape(3, 1, 1)
    for primitive in primitives:
        mask, offsets = _shape_mask(primitive, yy, xx)
        seg[mask] = primitive.class_id
        depth[mask] = _object_depth(primitive, offsets)[mask]
        albedo[:, mask] = np.asarray(primitive.color).reshape(3, 1)
    # nearer surfaces are lit more strongly
    shading = 1.15 - 0.3 * depth
    rgb = np.clip(albedo * shading, -1.0, 1.0)
    return rgb.astype(np.float32), depth[None].astype(np.float32), seg


def generate_scene(seed: int, spec: SplitSpec) -> SceneTriplet:
    check_split_spec(spec)
    rng = np.random.default_rng(seed)
    background = np.clip(np.asarray(BACKGROUND_COLOR) + rng.normal(0.0, COLOR_JITTER, size=3), -1.0, 1.0)
    primitives = sample_primitives(rng, spec)
    rgb, depth, seg = render(primitives, spec.resolution, background)
    return SceneTriplet(seed=seed, rgb=rgb, depth=depth, seg=seg)


def split_seeds(spec: SplitSpec) -> Tuple[NDArray, NDArray, NDArray]:
    """Disjoint consecutive seed ranges for D1, D2 and D3."""
    base = spec.seed * SEED_STRIDE
    d1 = np.arange(base, base + spec.n_d1, dtype=np.int64)
    d2 = np.arange(d1[-1] + 1, d1[-1] + 1 + spec.n_d2, dtype=np.int64)
    d3 = np.arange(d2[-1] + 1, d2[-1] + 1 + spec.n_d3, dtype=np.int64)
    return d1, d2, d3


def _render_all(seeds: NDArray, spec: SplitSpec) -> List[SceneTriplet]:
    return [generate_scene(int(seed), spec) for seed in seeds]


def _stack(scenes: List[SceneTriplet], field: str) -> NDArray:
    return np.stack([getattr(scene, field) for scene in scenes])


def make_splits(spec: SplitSpec) -> Tuple[RgbSegSplit, RgbDepthSplit, DepthSegSplit]:
    """
    D1 exposes (rgb, seg), D2 (rgb, depth) and D3 (depth, seg); no scene is
    shared between splits.
    """
    check_split_spec(spec)
    seeds_d1, seeds_d2, seeds_d3 = split_seeds(spec)
    logger.info("generating %d/%d/%d scenes at %dx%d", spec.n_d1, spec.n_d2, spec.n_d3, *spec.resolution)
    d1 = _render_all(seeds_d1, spec)
    d2 = _render_all(seeds_d2, spec)
    d3 = _render_all(seeds_d3, spec)
    return (RgbSegSplit("D1", spec, seeds_d1, rgb=_stack(d1, "rgb"), seg=_stack(d1, "seg")),
            RgbDepthSplit("D2", spec, seeds_d2, rgb=_stack(d2, "rgb"), depth=_stack(d2, "depth")),
            DepthSegSplit("D3", spec, seeds_d3, depth=_stack(d3, "depth"), seg=_stack(d3, "seg")))


def make_eval_triplets(spec: SplitSpec) -> TripletSplit:
    """Full triplets of the D3 scenes, for multimodal (rgb, depth) evaluation only."""
    check_split_spec(spec)
    seeds = split_seeds(spec)[2]
    scenes = _render_all(seeds, spec)
    return TripletSplit("D3", spec, seeds, rgb=_stack(scenes, "rgb"), depth=_stack(scenes, "depth"),
                        seg=_stack(scenes, "seg"))


def combined_rgb(d1: RgbSegSplit, d2: RgbDepthSplit) -> NDArray:
    """The union of RGB images available to training."""
    return np.concatenate([d1.rgb, d2.rgb], axis=0)
