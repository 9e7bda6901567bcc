from .datatypes import (SplitSpec, SceneTriplet, Split, RgbSegSplit, RgbDepthSplit, DepthSegSplit, TripletSplit,
                        ShapeKind, GradientKind)
from .generator import generate_scene, make_splits, make_eval_triplets, combined_rgb, split_seeds
from .iofile import save_dataset, load_dataset
