import numpy as np
import pytest

from networks import LossKind, ModalitySpec, SideInfoMode
from scenes import make_eval_triplets
from tensorcore import CompositionError, ConfigError, DimensionError, Mode, ParameterError, ProtocolError, Tensor
from translation import (FusionSpec, IndexSource, Strategy, TranslationGraph, build_mixmatch_graph, compose,
                         compose_cascade, compose_fusion, count_trained_modules, fuse_latents, load_graph,
                         register_modality, register_training_pair, save_graph)
from translation.config import RGB, DEPTH, SEGMENTATION


class TestRegistration:
    def test_duplicate_modality(self, tiny_graph):
        with pytest.raises(CompositionError, match="already registered"):
            register_modality(tiny_graph, ModalitySpec.depth(DEPTH))

    def test_pair_with_unknown_modality(self, tiny_graph):
        with pytest.raises(CompositionError, match="unknown modality 'N'"):
            register_training_pair(tiny_graph, RGB, "N")

    def test_pair_is_not_autoencoder(self, tiny_graph):
        with pytest.raises(CompositionError, match="autoencoder"):
            register_training_pair(tiny_graph, RGB, RGB)

    def test_pairs_are_bidirectional(self, tiny_graph):
        assert (SEGMENTATION, RGB) in tiny_graph.trained_pairs
        assert (DEPTH, RGB) in tiny_graph.trained_pairs
        assert (DEPTH, SEGMENTATION) not in tiny_graph.trained_pairs

    def test_zero_pair_protocol(self, tiny_graph):
        tiny_graph.validate_training_pairs()
        register_training_pair(tiny_graph, SEGMENTATION, DEPTH)
        with pytest.raises(ProtocolError, match="zero-pair"):
            tiny_graph.validate_training_pairs()


class TestCompose:
    def test_zero_pair_translation(self, tiny_graph, tiny_splits):
        d3 = tiny_splits[2]
        translator = compose(tiny_graph, DEPTH, SEGMENTATION)
        assert translator.zero_pair
        labels = translator.predict(d3.depth)
        assert labels.shape == d3.seg.shape
        assert labels.dtype == np.uint8
        assert labels.max() < 4

    def test_seen_translation(self, tiny_graph, tiny_splits):
        translator = compose(tiny_graph, RGB, DEPTH)
        assert not translator.zero_pair
        assert translator.predict(tiny_splits[0].rgb).shape == (12, 1, 16, 16)

    def test_segmentation_input_is_one_hot_encoded(self, tiny_graph, tiny_splits):
        out = compose(tiny_graph, SEGMENTATION, DEPTH)(tiny_splits[2].seg)
        assert out.shape == (4, 1, 16, 16)

    def test_empty_graph(self, tiny_arch):
        with pytest.raises(CompositionError, match="empty"):
            compose(TranslationGraph(tiny_arch, np.random.default_rng(0)), RGB, DEPTH)

    def test_unknown_modality(self, tiny_graph):
        with pytest.raises(CompositionError, match="unknown modality"):
            compose(tiny_graph, "N", SEGMENTATION)

    def test_unaligned_modality(self, tiny_graph):
        register_modality(tiny_graph, ModalitySpec("N", 2, LossKind.depth_berhu))
        with pytest.raises(CompositionError, match="not part of any trained pair"):
            compose(tiny_graph, "N", SEGMENTATION)

    def test_deterministic(self, tiny_graph, tiny_splits):
        translator = compose(tiny_graph, DEPTH, SEGMENTATION)
        np.testing.assert_array_equal(translator(tiny_splits[2].depth).values,
                                      translator(tiny_splits[2].depth).values)

    def test_cascade(self, tiny_graph, tiny_splits):
        cascade = compose_cascade(tiny_graph, [DEPTH, RGB, SEGMENTATION])
        assert not cascade.zero_pair
        assert cascade.predict(tiny_splits[2].depth).shape == (4, 16, 16)

    def test_cascade_too_short(self, tiny_graph):
        with pytest.raises(CompositionError, match="at least two"):
            compose_cascade(tiny_graph, [DEPTH])


class TestFusion:
    def encodings(self, graph, splits):
        triplets = make_eval_triplets(splits[2].spec)
        return triplets, {RGB: graph.encoders[RGB](Tensor(triplets.rgb)),
                          DEPTH: graph.encoders[DEPTH](Tensor(triplets.depth))}

    def test_boundaries_return_single_latent(self, tiny_graph, tiny_splits):
        _, outputs = self.encodings(tiny_graph, tiny_splits)
        latent, side = fuse_latents(outputs, FusionSpec(alpha=0.0))
        assert latent is outputs[RGB].latent
        assert side is outputs[RGB]
        latent, side = fuse_latents(outputs, FusionSpec(alpha=1.0, index_source=IndexSource.depth))
        assert latent is outputs[DEPTH].latent
        assert side is outputs[DEPTH]

    def test_weighted_average(self, tiny_graph, tiny_splits):
        _, outputs = self.encodings(tiny_graph, tiny_splits)
        latent, _ = fuse_latents(outputs, FusionSpec(alpha=0.25))
        expected = 0.75 * outputs[RGB].latent.values + 0.25 * outputs[DEPTH].latent.values
        np.testing.assert_allclose(latent.values, expected, rtol=1e-6)

    def test_alpha_range(self, tiny_graph, tiny_splits):
        _, outputs = self.encodings(tiny_graph, tiny_splits)
        with pytest.raises(ParameterError, match="alpha"):
            fuse_latents(outputs, FusionSpec(alpha=1.5))

    def test_missing_encoding(self, tiny_graph, tiny_splits):
        _, outputs = self.encodings(tiny_graph, tiny_splits)
        with pytest.raises(CompositionError):
            fuse_latents({RGB: outputs[RGB]}, FusionSpec())

    def test_shape_mismatch(self, tiny_graph, tiny_splits):
        _, outputs = self.encodings(tiny_graph, tiny_splits)
        outputs[DEPTH].latent = Tensor(np.zeros((1, 8, 4, 4), dtype=np.float32))
        with pytest.raises(DimensionError, match="shape"):
            fuse_latents(outputs, FusionSpec(alpha=0.5))

    def test_alpha_zero_matches_rgb_translation(self, tiny_graph, tiny_splits):
        triplets, _ = self.encodings(tiny_graph, tiny_splits)
        fused = compose_fusion(tiny_graph, SEGMENTATION, FusionSpec(alpha=0.0, index_source=IndexSource.rgb))
        np.testing.assert_array_equal(fused.predict({RGB: triplets.rgb, DEPTH: triplets.depth}),
                                      compose(tiny_graph, RGB, SEGMENTATION).predict(triplets.rgb))

    def test_alpha_one_matches_depth_translation(self, tiny_graph, tiny_splits):
        triplets, _ = self.encodings(tiny_graph, tiny_splits)
        fused = compose_fusion(tiny_graph, SEGMENTATION, FusionSpec(alpha=1.0, index_source=IndexSource.depth))
        np.testing.assert_array_equal(fused.predict({RGB: triplets.rgb, DEPTH: triplets.depth}),
                                      compose(tiny_graph, DEPTH, SEGMENTATION).predict(triplets.depth))


class TestModuleCount:
    @pytest.mark.parametrize("n, anchor, pairwise", [(2, (2, 2, 1), 1), (3, (3, 3, 2), 3), (10, (10, 10, 9), 45)])
    def test_counts(self, n, anchor, pairwise):
        count = count_trained_modules(n, Strategy.mixmatch_anchor)
        assert (count.encoders, count.decoders, count.pairs) == anchor
        assert count_trained_modules(n, Strategy.pairwise).pairs == pairwise

    def test_single_domain(self):
        with pytest.raises(ParameterError):
            count_trained_modules(1, Strategy.pairwise)


class TestGraphFiles:
    def test_roundtrip(self, tiny_graph, tiny_splits, tmp_path):
        x = tiny_splits[2].depth
        tiny_graph.encoders[DEPTH](Tensor(x), mode=Mode.train)
        save_graph(tiny_graph, tmp_path)
        assert (tmp_path / "graph.json").exists()
        assert (tmp_path / "disc_R.ckpt").exists()
        loaded = load_graph(tmp_path)
        assert loaded.trained_pairs == tiny_graph.trained_pairs
        np.testing.assert_array_equal(compose(loaded, DEPTH, SEGMENTATION).predict(x),
                                      compose(tiny_graph, DEPTH, SEGMENTATION).predict(x))

    def test_side_info_is_restored(self, tiny_arch, tmp_path):
        graph = build_mixmatch_graph(tiny_arch, 4, SideInfoMode.skip_connections, seed=3, autoencoders=False)
        save_graph(graph, tmp_path)
        loaded = load_graph(tmp_path)
        assert loaded.modalities[DEPTH].decoder_side_info is SideInfoMode.skip_connections
        assert not loaded.autoencoders_enabled

    def test_missing_description(self, tmp_path):
        with pytest.raises(ConfigError, match="graph.json"):
            load_graph(tmp_path)
