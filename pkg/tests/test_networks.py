import numpy as np
import pytest

from networks import (ArchConfig, ModalitySpec, SideInfoMode, UpsamplingMode, build_decoder, build_discriminator,
                      build_encoder, decode, discriminate, encode)
from networks.check_config import check_arch, check_modality
from networks.datatypes import OutputActivation
from tensorcore import ConfigError, ContractError, DimensionError, Mode, Tensor


def images(rng, batch, channels, size=16):
    return Tensor(rng.standard_normal((batch, channels, size, size)).astype(np.float32))


class TestArchConfig:
    def test_desk_preset(self):
        arch = ArchConfig.preset("desk")
        assert arch.num_stages == 3
        assert arch.latent_channels == 64
        assert arch.latent_resolution == (4, 4)

    def test_full_preset(self):
        arch = ArchConfig.preset("full")
        assert arch.stages == [(2, 64), (2, 128), (3, 256), (3, 512), (3, 512)]
        assert arch.latent_resolution == (8, 8)

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            ArchConfig.preset("huge")

    @pytest.mark.parametrize("arch, message", [
        (ArchConfig(stages=[]), "at least one stage"),
        (ArchConfig(stages=[(0, 4)]), "at least one convolution"),
        (ArchConfig(stages=[(1, 4)], kernel_size=4), "odd"),
        (ArchConfig(stages=[(1, 4), (1, 8)], input_resolution=(18, 18)), "divisible"),
        (ArchConfig(stages=[(1, 4)], discriminator_channels=()), "Discriminator"),
    ])
    def test_check_arch(self, arch, message):
        with pytest.raises(ConfigError, match=message):
            check_arch(arch)

    def test_rgb_decoder_takes_no_side_information(self):
        spec = ModalitySpec.rgb()
        spec.decoder_side_info = SideInfoMode.pooling_indices
        with pytest.raises(ConfigError, match="side information"):
            check_modality(spec)

    def test_segmentation_outputs_logits(self):
        spec = ModalitySpec.segmentation(num_classes=4)
        spec.output_activation = OutputActivation.linear
        with pytest.raises(ConfigError, match="logits"):
            check_modality(spec)

    def test_segmentation_class_range(self):
        with pytest.raises(ConfigError, match="classes"):
            check_modality(ModalitySpec.segmentation(num_classes=15))


class TestEncoder:
    def test_output_structure(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        out = encode(enc, images(rng, 2, 3))
        assert out.latent.shape == (2, 8, 4, 4)
        assert out.num_stages == 2
        assert [s.shape for s in out.skip_features] == [(2, 4, 16, 16), (2, 8, 8, 8)]
        assert [i.input_shape for i in out.indices] == [(2, 4, 16, 16), (2, 8, 8, 8)]

    def test_parameter_names(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.depth(), tiny_arch, rng)
        names = [p.name for p in enc.parameters()]
        assert "enc_D.stage0.conv0.w" in names
        assert len(names) == len(set(names))

    def test_wrong_channels(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.depth(), tiny_arch, rng)
        with pytest.raises(DimensionError, match="axis 1"):
            enc(images(rng, 1, 3))

    def test_size_not_divisible(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.depth(), tiny_arch, rng)
        with pytest.raises(DimensionError, match="divisible"):
            enc(images(rng, 1, 1, size=6))

    def test_noise_only_in_train_mode(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.depth(), tiny_arch, rng)
        x = images(rng, 2, 1)
        evaluated = enc(x, noise_sigma=0.5, mode=Mode.eval)
        assert evaluated.latent is evaluated.clean_latent
        trained = enc(x, noise_sigma=0.5, mode=Mode.train, rng=np.random.default_rng(0))
        assert not np.allclose(trained.latent.values, trained.clean_latent.values)

    def test_noise_needs_generator(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.depth(), tiny_arch, rng)
        with pytest.raises(ContractError, match="random generator"):
            enc(images(rng, 2, 1), noise_sigma=0.5, mode=Mode.train)

    def test_frozen_encoder_keeps_statistics(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        enc.freeze()
        before = {k: v.copy() for k, v in enc.state_dict().items()}
        enc(images(rng, 2, 3), mode=Mode.train)
        after = enc.state_dict()
        for key, value in before.items():
            np.testing.assert_array_equal(after[key], value)
        assert not any(p.requires_grad for p in enc.parameters())
        assert enc.trainable_parameters() == []

    def test_train_mode_moves_statistics(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        enc(images(rng, 2, 3), mode=Mode.train)
        assert not np.allclose(enc.state_dict()["enc_R.stage0.conv0.bn.running_mean"], 0.0)

    def test_state_dict_roundtrip(self, tiny_arch, rng):
        source = build_encoder(ModalitySpec.rgb(), tiny_arch, np.random.default_rng(1))
        source(images(rng, 2, 3), mode=Mode.train)
        target = build_encoder(ModalitySpec.rgb(), tiny_arch, np.random.default_rng(2))
        target.load_state_dict(source.state_dict())
        x = images(rng, 2, 3)
        np.testing.assert_array_equal(source(x).latent.values, target(x).latent.values)

    def test_load_state_dict_missing(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        with pytest.raises(DimensionError, match="lacks"):
            enc.load_state_dict({})

    def test_load_state_dict_wrong_shape(self, tiny_arch, rng):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        arrays = enc.state_dict()
        arrays["enc_R.stage0.conv0.w"] = np.zeros((1, 1, 1, 1), dtype=np.float32)
        with pytest.raises(DimensionError, match="shape"):
            enc.load_state_dict(arrays)


class TestDecoder:
    @pytest.mark.parametrize("side_info", list(SideInfoMode))
    def test_output_shape(self, tiny_arch, rng, side_info):
        enc = build_encoder(ModalitySpec.rgb(), tiny_arch, rng)
        dec = build_decoder(ModalitySpec.segmentation(num_classes=5, side_info=side_info), tiny_arch, rng)
        side = enc(images(rng, 2, 3))
        assert decode(dec, side.latent, side).shape == (2, 5, 16, 16)

    def test_transposed_upsampling(self, tiny_arch, rng):
        arch = ArchConfig(stages=tiny_arch.stages, input_resolution=(16, 16), upsampling=UpsamplingMode.transposed)
        dec = build_decoder(ModalitySpec.depth(side_info=SideInfoMode.none), arch, rng)
        assert any(".up." in p.name for p in dec.parameters())
        assert dec(Tensor(np.zeros((1, 8, 4, 4), dtype=np.float32))).shape == (1, 1, 16, 16)

    def test_rgb_output_in_tanh_range(self, tiny_arch, rng):
        dec = build_decoder(ModalitySpec.rgb(), tiny_arch, rng)
        out = dec(Tensor(rng.standard_normal((2, 8, 4, 4)).astype(np.float32) * 10))
        assert np.abs(out.values).max() <= 1.0

    def test_missing_side_information(self, tiny_arch, rng):
        dec = build_decoder(ModalitySpec.depth(), tiny_arch, rng)
        with pytest.raises(ContractError, match="side information"):
            dec(Tensor(np.zeros((1, 8, 4, 4), dtype=np.float32)))

    def test_stage_count_mismatch(self, tiny_arch, rng):
        deeper = ArchConfig(stages=[(1, 4), (1, 4), (1, 8)], input_resolution=(16, 16))
        side = build_encoder(ModalitySpec.rgb(), deeper, rng)(images(rng, 1, 3))
        dec = build_decoder(ModalitySpec.depth(), tiny_arch, rng)
        with pytest.raises(DimensionError, match="stages"):
            dec(Tensor(np.zeros((1, 8, 4, 4), dtype=np.float32)), side)

    def test_latent_channel_mismatch(self, tiny_arch, rng):
        dec = build_decoder(ModalitySpec.depth(side_info=SideInfoMode.none), tiny_arch, rng)
        with pytest.raises(DimensionError, match="channels"):
            dec(Tensor(np.zeros((1, 4, 4, 4), dtype=np.float32)))


class TestDiscriminator:
    def test_patch_scores(self, tiny_arch, rng):
        disc = build_discriminator(tiny_arch, rng)
        assert discriminate(disc, images(rng, 3, 3)).shape == (3, 1, 4, 4)

    def test_rgb_only(self, tiny_arch, rng):
        disc = build_discriminator(tiny_arch, rng)
        with pytest.raises(DimensionError, match="RGB"):
            disc(images(rng, 1, 1))
