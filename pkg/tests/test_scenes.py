import hashlib

import numpy as np
import pytest

from scenes import (DepthSegSplit, GradientKind, RgbDepthSplit, RgbSegSplit, ShapeKind, SplitSpec, combined_rgb,
                    generate_scene, make_eval_triplets, make_splits, save_dataset, split_seeds)
from scenes.check_config import check_split_spec
from scenes.datatypes import Primitive
from scenes.generator import class_color, class_gradient, class_shape, render
from tensorcore import ConfigError


class TestGenerateScene:
    def test_shapes_and_ranges(self, tiny_spec):
        scene = generate_scene(5, tiny_spec)
        assert scene.rgb.shape == (3, 16, 16) and scene.rgb.dtype == np.float32
        assert scene.depth.shape == (1, 16, 16) and scene.depth.dtype == np.float32
        assert scene.seg.shape == (16, 16) and scene.seg.dtype == np.uint8
        assert np.abs(scene.rgb).max() <= 1.0
        assert 0.0 <= scene.depth.min() and scene.depth.max() <= 1.0
        assert scene.seg.max() < tiny_spec.num_classes

    def test_deterministic(self, tiny_spec):
        a, b = generate_scene(11, tiny_spec), generate_scene(11, tiny_spec)
        np.testing.assert_array_equal(a.rgb, b.rgb)
        np.testing.assert_array_equal(a.depth, b.depth)
        np.testing.assert_array_equal(a.seg, b.seg)

    def test_background_only(self):
        spec = SplitSpec(resolution=(16, 16), min_primitives=0, max_primitives=0)
        scene = generate_scene(0, spec)
        assert (scene.seg == 0).all()
        assert (scene.depth == 1.0).all()

    def test_background_is_farthest(self, tiny_spec):
        scene = generate_scene(3, tiny_spec)
        objects = scene.seg > 0
        assert objects.any()
        assert scene.depth[0][objects].max() < 1.0
        assert (scene.depth[0][~objects] == 1.0).all()

    def test_nearer_primitive_occludes(self):
        far = Primitive(1, ShapeKind.rectangle, GradientKind.horizontal, (0.5, 0.5), (0.4, 0.4), 0.8,
                        (0.8, -0.6, -0.6))
        near = Primitive(2, ShapeKind.rectangle, GradientKind.vertical, (0.5, 0.5), (0.1, 0.1), 0.3,
                         (-0.6, 0.7, -0.5))
        rgb, depth, seg = render([far, near], (16, 16))
        assert seg[8, 8] == 2
        assert seg[2, 8] == 1
        assert depth[0, 8, 8] < depth[0, 2, 8]

    def test_class_attributes(self):
        assert class_color(1) == class_color(6)
        assert class_shape(1) != class_shape(6)
        assert {class_gradient(c) for c in range(1, 4)} == set(GradientKind)

    def test_seg_edges_are_depth_edges(self):
        spec = SplitSpec(resolution=(32, 32))
        # object ramps move depth by well under 0.04 per pixel; distinct layers differ by more
        threshold = 0.04
        boundary, matched = 0, 0
        for seed in range(20):
            scene = generate_scene(seed, spec)
            seg, depth = scene.seg.astype(np.int64), scene.depth[0].astype(np.float64)
            for axis in (0, 1):
                seg_edge = np.diff(seg, axis=axis) != 0
                depth_edge = np.abs(np.diff(depth, axis=axis)) > threshold
                boundary += int(seg_edge.sum())
                matched += int((seg_edge & depth_edge).sum())
        assert boundary > 0
        assert matched / boundary >= 0.9

    @pytest.mark.slow
    def test_every_class_is_common(self):
        spec = SplitSpec(resolution=(16, 16))
        present = np.zeros(spec.num_classes)
        for seed in range(1000):
            present[np.unique(generate_scene(seed, spec).seg)] += 1
        assert (present / 1000 >= 0.05).all(), present


class TestSplits:
    def test_modalities_per_split(self, tiny_splits):
        d1, d2, d3 = tiny_splits
        assert isinstance(d1, RgbSegSplit) and d1.FIELDS == ("rgb", "seg")
        assert isinstance(d2, RgbDepthSplit) and d2.FIELDS == ("rgb", "depth")
        assert isinstance(d3, DepthSegSplit) and d3.FIELDS == ("depth", "seg")
        assert not hasattr(d3, "rgb")
        assert (len(d1), len(d2), len(d3)) == (12, 12, 4)

    def test_splits_are_disjoint(self, tiny_spec):
        seeds = [set(s.tolist()) for s in split_seeds(tiny_spec)]
        assert not seeds[0] & seeds[1]
        assert not seeds[1] & seeds[2]
        assert not seeds[0] & seeds[2]

    def test_dataset_seed_changes_scenes(self, tiny_spec):
        other = SplitSpec(n_d1=12, n_d2=12, n_d3=4, seed=1, num_classes=4, resolution=(16, 16))
        assert not np.array_equal(make_splits(tiny_spec)[0].rgb, make_splits(other)[0].rgb)

    def test_eval_triplets_match_d3(self, tiny_spec, tiny_splits):
        triplets = make_eval_triplets(tiny_spec)
        d3 = tiny_splits[2]
        np.testing.assert_array_equal(triplets.seeds, d3.seeds)
        np.testing.assert_array_equal(triplets.depth, d3.depth)
        np.testing.assert_array_equal(triplets.seg, d3.seg)
        assert triplets.rgb.shape == (4, 3, 16, 16)

    def test_combined_rgb(self, tiny_splits):
        assert combined_rgb(tiny_splits[0], tiny_splits[1]).shape == (24, 3, 16, 16)

    def test_take(self, tiny_splits):
        part = tiny_splits[0].take([0, 2])
        assert len(part) == 2
        np.testing.assert_array_equal(part.rgb[1], tiny_splits[0].rgb[2])

    def test_dataset_file_is_stable(self, tiny_spec, tmp_path):
        digests = []
        for run in ("a", "b"):
            path = tmp_path / f"{run}.mmds"
            save_dataset(make_splits(tiny_spec)[0], path)
            digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
        assert digests[0] == digests[1]


class TestCheckSplitSpec:
    @pytest.mark.parametrize("changes, message", [
        (dict(n_d3=0), "n_d3"),
        (dict(resolution=(8, 8)), "below"),
        (dict(num_classes=1), "num_classes"),
        (dict(num_classes=15), "num_classes"),
        (dict(min_primitives=4, max_primitives=2), "Primitive"),
        (dict(seed=-1), "Seed"),
    ])
    def test_invalid(self, changes, message):
        with pytest.raises(ConfigError, match=message):
            check_split_spec(SplitSpec(**changes))

    def test_default_is_valid(self):
        check_split_spec(SplitSpec())
