import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from networks import (ArchConfig, Decoder, Discriminator, Encoder, EncoderOutput, LossKind, ModalitySpec,
                      OutputActivation, ScalePreset, SideInfoMode, UpsamplingMode, build_decoder,
                      build_discriminator, build_encoder)
from tensorcore import (CompositionError, ConfigError, DimensionError, Mode, ParameterError, ProtocolError, Tensor,
                        load_arrays, save_arrays, weighted_sum)
from tensorcore.config import DEFAULT_DTYPE

from .config import RGB, DEPTH, SEGMENTATION, GRAPH_FILE, CHECKPOINT_SUFFIX
from .datatypes import FusionSpec, ModuleCount, Strategy
from .utils import labels_from_logits, one_hot

logger = logging.getLogger(__name__)


class TranslationGraph:
    """
    One encoder and one decoder per modality plus the pairs they are trained on.

    Any registered encoder can be chained with any registered decoder as long
    as both took part in at least one trained pair (or autoencoder), whether
    or not that particular pair was ever seen.
    """

    def __init__(self, arch: ArchConfig, rng: np.random.Generator, autoencoders_enabled: bool = True):
        self.arch = arch
        self.rng = rng
        self.autoencoders_enabled = autoencoders_enabled
        self.modalities: Dict[str, ModalitySpec] = {}
        self.encoders: Dict[str, Encoder] = {}
        self.decoders: Dict[str, Decoder] = {}
        self.trained_pairs: Set[Tuple[str, str]] = set()
        self.discriminator: Optional[Discriminator] = None

    def __repr__(self) -> str:
        return f"TranslationGraph(modalities={list(self.modalities)}, pairs={sorted(self.trained_pairs)})"

    def networks(self) -> Dict[str, object]:
        nets = {enc.name: enc for enc in self.encoders.values()}
        nets.update({dec.name: dec for dec in self.decoders.values()})
        if self.discriminator is not None:
            nets[self.discriminator.name] = self.discriminator
        return nets

    def add_discriminator(self) -> Discriminator:
        self.discriminator = build_discriminator(self.arch, self.rng)
        return self.discriminator

    def _aligned_modalities(self) -> Set[str]:
        return {m for pair in self.trained_pairs for m in pair}

    def can_encode(self, name: str) -> bool:
        return name in self.encoders and name in self._aligned_modalities()

    def can_decode(self, name: str) -> bool:
        return name in self.decoders and name in self._aligned_modalities()

    def is_seen(self, source: str, target: str) -> bool:
        if source == target:
            return self.autoencoders_enabled and source in self._aligned_modalities()
        return (source, target) in self.trained_pairs

    def validate_training_pairs(self, forbidden: Sequence[Tuple[str, str]] = ((DEPTH, SEGMENTATION),)) -> None:
        """Refuse a graph that would train on a pair reserved for zero-pair evaluation."""
        for a, b in forbidden:
            if (a, b) in self.trained_pairs or (b, a) in self.trained_pairs:
                raise ProtocolError(f"pair ({a}, {b}) must never be trained: it is the zero-pair test direction")

    def state_dicts(self) -> Dict[str, Dict[str, NDArray]]:
        return {name: net.state_dict() for name, net in self.networks().items()}


def register_modality(g: TranslationGraph, spec: ModalitySpec) -> TranslationGraph:
    if spec.name in g.modalities:
        raise CompositionError(f"modality '{spec.name}' is already registered")
    g.modalities[spec.name] = spec
    g.encoders[spec.name] = build_encoder(spec, g.arch, g.rng)
    g.decoders[spec.name] = build_decoder(spec, g.arch, g.rng)
    logger.debug("registered modality %s (%d channels, %s)", spec.name, spec.channels, spec.decoder_side_info.name)
    return g


def register_training_pair(g: TranslationGraph, i: str, j: str) -> TranslationGraph:
    for name in (i, j):
        if name not in g.modalities:
            raise CompositionError(f"training pair ({i}, {j}) references unknown modality '{name}'")
    if i == j:
        raise CompositionError(f"({i}, {j}) is an autoencoder, not a translation pair")
    g.trained_pairs.add((i, j))
    g.trained_pairs.add((j, i))
    return g


def _to_input(spec: ModalitySpec, values: Union[Tensor, NDArray]) -> Tensor:
    if isinstance(values, Tensor):
        return values
    values = np.asarray(values)
    if spec.loss_kind is LossKind.segmentation_ce and values.ndim == 3:
        return Tensor(one_hot(values, spec.channels))
    return Tensor(values.astype(DEFAULT_DTYPE, copy=False))


def _reencode(spec: ModalitySpec, decoded: Tensor) -> Tensor:
    """Turn a decoder output into the input its own modality's encoder expects."""
    if spec.output_activation is OutputActivation.logits:
        return Tensor(one_hot(labels_from_logits(decoded), spec.channels))
    return Tensor(decoded.values)


class Translator:
    """
    Callable chain encoder -> decoder (-> encoder -> decoder ...) in eval mode.

    A path of two modalities is a direct translation; longer paths decode to
    every intermediate modality as an explicit image and encode it again.
    """

    def __init__(self, graph: TranslationGraph, path: Sequence[str]):
        self.graph = graph
        self.path = list(path)

    def __repr__(self) -> str:
        return f"Translator({'->'.join(self.path)})"

    @property
    def target(self) -> ModalitySpec:
        return self.graph.modalities[self.path[-1]]

    @property
    def zero_pair(self) -> bool:
        return any(not self.graph.is_seen(a, b) for a, b in zip(self.path, self.path[1:]))

    def __call__(self, x: Union[Tensor, NDArray]) -> Tensor:
        x = _to_input(self.graph.modalities[self.path[0]], x)
        out = x
        for hop, (source, target) in enumerate(zip(self.path, self.path[1:])):
            encoded = self.graph.encoders[source](x, mode=Mode.eval)
            out = self.graph.decoders[target](encoded.latent, encoded, Mode.eval)
            if hop < len(self.path) - 2:
                x = _reencode(self.graph.modalities[target], out)
        return out

    def predict(self, x: Union[Tensor, NDArray]) -> NDArray:
        """numpy output; segmentation targets are returned as label maps."""
        out = self(x)
        if self.target.output_activation is OutputActivation.logits:
            return labels_from_logits(out)
        return out.values


def compose(g: TranslationGraph, i: str, j: str) -> Translator:
    if not g.modalities:
        raise CompositionError("cannot compose on an empty translation graph")
    for name in (i, j):
        if name not in g.modalities:
            raise CompositionError(f"unknown modality '{name}'")
    if not g.can_encode(i):
        raise CompositionError(f"encoder '{i}' is not part of any trained pair")
    if not g.can_decode(j):
        raise CompositionError(f"decoder '{j}' is not part of any trained pair")
    return Translator(g, [i, j])


def compose_cascade(g: TranslationGraph, path: Sequence[str]) -> Translator:
    if len(path) < 2:
        raise CompositionError(f"a cascade needs at least two modalities, got {list(path)}")
    for source, target in zip(path, path[1:]):
        compose(g, source, target)
    return Translator(g, path)


def fuse_latents(outputs: Mapping[str, EncoderOutput], fusion: FusionSpec) -> Tuple[Tensor, EncoderOutput]:
    """
    Weighted average (1 - alpha) * h_R + alpha * h_D of aligned latents.

    Side information is taken wholly from the encoder named by
    fusion.index_source. At alpha 0 or 1 the corresponding latent is
    returned as is.
    """
    if not 0.0 <= fusion.alpha <= 1.0:
        raise ParameterError(f"fusion alpha must lie in [0, 1], got {fusion.alpha}")
    weights = fusion.weights()
    if set(outputs) != set(weights):
        raise CompositionError(f"fusion expects encodings of {sorted(weights)}, got {sorted(outputs)}")
    source = fusion.index_source.value
    if source not in outputs:
        raise CompositionError(f"index source '{source}' is not among the fused encodings")
    names = sorted(outputs)
    shapes = {outputs[name].latent.shape for name in names}
    if len(shapes) != 1:
        raise DimensionError(f"fused latents must share one shape, got {sorted(shapes)}")
    if fusion.alpha == 0.0:
        latent = outputs[RGB].latent
    elif fusion.alpha == 1.0:
        latent = outputs[DEPTH].latent
    else:
        latent = weighted_sum([outputs[name].latent for name in names], [weights[name] for name in names])
    return latent, outputs[source]


class FusionTranslator:
    """(RGB, depth) -> target translator through a fused latent."""

    def __init__(self, graph: TranslationGraph, target: str, fusion: FusionSpec):
        self.graph = graph
        self.target = target
        self.fusion = fusion

    def __call__(self, inputs: Mapping[str, Union[Tensor, NDArray]]) -> Tensor:
        encoded = {name: self.graph.encoders[name](_to_input(self.graph.modalities[name], x), mode=Mode.eval)
                   for name, x in inputs.items()}
        latent, side = fuse_latents(encoded, self.fusion)
        return self.graph.decoders[self.target](latent, side, Mode.eval)

    def predict(self, inputs: Mapping[str, Union[Tensor, NDArray]]) -> NDArray:
        out = self(inputs)
        if self.graph.modalities[self.target].output_activation is OutputActivation.logits:
            return labels_from_logits(out)
        return out.values


def compose_fusion(g: TranslationGraph, target: str, fusion: FusionSpec) -> FusionTranslator:
    for name in fusion.weights():
        compose(g, name, target)
    return FusionTranslator(g, target, fusion)


def count_trained_modules(n_domains: int, strategy: Strategy) -> ModuleCount:
    """
    Modules to train for n domains. The anchor strategy pairs every domain
    with one anchor; the pairwise strategy trains a dedicated translator per
    unordered pair.
    """
    if n_domains < 2:
        raise ParameterError(f"need at least two domains, got {n_domains}")
    if strategy is Strategy.pairwise:
        pairs = n_domains * (n_domains - 1) // 2
        return ModuleCount(encoders=pairs, decoders=pairs, pairs=pairs)
    return ModuleCount(encoders=n_domains, decoders=n_domains, pairs=n_domains - 1)


def build_mixmatch_graph(arch: ArchConfig, num_classes: int, side_info: SideInfoMode, seed: int,
                         autoencoders: bool = True) -> TranslationGraph:
    """RGB anchor with segmentation and depth, trained on (R, S) and (R, D) plus the RGB discriminator."""
    g = TranslationGraph(arch, np.random.default_rng(seed), autoencoders_enabled=autoencoders)
    register_modality(g, ModalitySpec.rgb(RGB))
    register_modality(g, ModalitySpec.depth(DEPTH, side_info))
    register_modality(g, ModalitySpec.segmentation(SEGMENTATION, num_classes, side_info))
    register_training_pair(g, RGB, SEGMENTATION)
    register_training_pair(g, RGB, DEPTH)
    g.add_discriminator()
    return g


def _describe(g: TranslationGraph) -> Dict:
    arch = asdict(g.arch)
    arch["scale_preset"] = g.arch.scale_preset.name
    arch["upsampling"] = g.arch.upsampling.name
    modalities = []
    for spec in g.modalities.values():
        modalities.append({"name": spec.name, "channels": spec.channels, "loss_kind": spec.loss_kind.name,
                           "decoder_side_info": spec.decoder_side_info.name,
                           "output_activation": spec.output_activation.name})
    return {"arch": arch, "modalities": modalities, "trained_pairs": sorted(list(p) for p in g.trained_pairs),
            "autoencoders_enabled": g.autoencoders_enabled, "discriminator": g.discriminator is not None}


def save_graph(g: TranslationGraph, directory: Union[str, Path]) -> None:
    """One checkpoint per network (enc_R.ckpt, dec_S.ckpt, disc_R.ckpt, ...) plus graph.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / GRAPH_FILE, "w") as f:
        json.dump(_describe(g), f, indent=2)
    for name, net in g.networks().items():
        save_arrays(directory / f"{name}{CHECKPOINT_SUFFIX}", net.state_dict())
    logger.info("saved %d networks to %s", len(g.networks()), directory)


def load_graph(directory: Union[str, Path]) -> TranslationGraph:
    directory = Path(directory)
    try:
        with open(directory / GRAPH_FILE) as f:
            description = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"no {GRAPH_FILE} in {directory}") from None
    arch_fields = dict(description["arch"])
    arch = ArchConfig(stages=[tuple(s) for s in arch_fields["stages"]],
                      input_resolution=tuple(arch_fields["input_resolution"]),
                      kernel_size=arch_fields["kernel_size"],
                      scale_preset=ScalePreset[arch_fields["scale_preset"]],
                      discriminator_channels=tuple(arch_fields["discriminator_channels"]),
                      upsampling=UpsamplingMode[arch_fields["upsampling"]])
    g = TranslationGraph(arch, np.random.default_rng(0), description["autoencoders_enabled"])
    for item in description["modalities"]:
        register_modality(g, ModalitySpec(item["name"], item["channels"], LossKind[item["loss_kind"]],
                                          SideInfoMode[item["decoder_side_info"]],
                                          OutputActivation[item["output_activation"]]))
    for i, j in description["trained_pairs"]:
        g.trained_pairs.add((i, j))
    if description["discriminator"]:
        g.add_discriminator()
    for name, net in g.networks().items():
        net.load_state_dict(load_arrays(directory / f"{name}{CHECKPOINT_SUFFIX}"))
    return g
