"""
Parameterised building blocks shared by encoders, decoders and the discriminator.
"""
from typing import Dict, List

import numpy as np
from numpy.typing import NDArray

from tensorcore import (BatchNormState, DimensionError, Mode, Parameter, Tensor, batchnorm, conv2d,
                        conv2d_transpose, leaky_relu, relu)
from tensorcore.config import DEFAULT_DTYPE


def he_uniform(rng: np.random.Generator, shape, fan_in: int) -> NDArray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(DEFAULT_DTYPE)


class Layer:
    def __init__(self, name: str):
        self.name = name
        self.params: Dict[str, Parameter] = {}
        self.stats: Dict[str, BatchNormState] = {}

    def add_parameter(self, key: str, values: NDArray) -> Parameter:
        self.params[key] = Parameter(values, name=f"{self.name}.{key}")
        return self.params[key]

    def parameters(self) -> List[Parameter]:
        return list(self.params.values())

    def buffers(self) -> Dict[str, NDArray]:
        arrays = {}
        for key, state in self.stats.items():
            arrays[f"{self.name}.{key}.running_mean"] = state.running_mean
            arrays[f"{self.name}.{key}.running_var"] = state.running_var
        return arrays


class ConvBlock(Layer):
    """conv (no bias) -> batchnorm -> ReLU, or LeakyReLU when leaky is set."""

    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1, leaky: bool = False):
        super().__init__(name)
        self.stride = stride
        self.pad = kernel // 2
        self.leaky = leaky
        self.in_channels = in_channels
        self.weight = self.add_parameter(
            "w", he_uniform(rng, (out_channels, in_channels, kernel, kernel), in_channels * kernel * kernel))
        self.gamma = self.add_parameter("gamma", np.ones(out_channels, dtype=DEFAULT_DTYPE))
        self.beta = self.add_parameter("beta", np.zeros(out_channels, dtype=DEFAULT_DTYPE))
        self.stats["bn"] = BatchNormState.create(out_channels)

    def __call__(self, x: Tensor, mode: Mode, update_stats: bool = True) -> Tensor:
        out = conv2d(x, self.weight, stride=self.stride, pad=self.pad)
        out = batchnorm(out, self.gamma, self.beta, self.stats["bn"], mode, update_stats)
        return leaky_relu(out) if self.leaky else relu(out)


class UpConvBlock(Layer):
    """Transposed conv doubling the resolution -> batchnorm -> ReLU."""

    def __init__(self, name: str, channels: int, kernel: int, rng: np.random.Generator):
        super().__init__(name)
        self.pad = kernel // 2
        self.weight = self.add_parameter(
            "w", he_uniform(rng, (channels, channels, kernel, kernel), channels * kernel * kernel))
        self.gamma = self.add_parameter("gamma", np.ones(channels, dtype=DEFAULT_DTYPE))
        self.beta = self.add_parameter("beta", np.zeros(channels, dtype=DEFAULT_DTYPE))
        self.stats["bn"] = BatchNormState.create(channels)

    def __call__(self, x: Tensor, mode: Mode, update_stats: bool = True) -> Tensor:
        out = conv2d_transpose(x, self.weight, stride=2, pad=self.pad, output_padding=1)
        out = batchnorm(out, self.gamma, self.beta, self.stats["bn"], mode, update_stats)
        return relu(out)


class ConvHead(Layer):
    """Plain conv with bias, used as the output layer."""

    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator):
        super().__init__(name)
        self.pad = kernel // 2
        self.weight = self.add_parameter(
            "w", he_uniform(rng, (out_channels, in_channels, kernel, kernel), in_channels * kernel * kernel))
        self.bias = self.add_parameter("b", np.zeros(out_channels, dtype=DEFAULT_DTYPE))

    def __call__(self, x: Tensor, mode: Mode, update_stats: bool = True) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=1, pad=self.pad)


class Network:
    """
    Ordered collection of layers with named parameters and batchnorm buffers.

    A frozen network keeps its parameters out of optimisers and does not move
    its running statistics.
    """

    def __init__(self, name: str):
        self.name = name
        self.layers: List[Layer] = []
        self.frozen = False

    def add(self, layer: Layer) -> Layer:
        self.layers.append(layer)
        return layer

    def parameters(self) -> List[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]

    def trainable_parameters(self) -> List[Parameter]:
        return [] if self.frozen else self.parameters()

    def freeze(self) -> None:
        self.frozen = True
        for p in self.parameters():
            p.requires_grad = False
            p.zero_grad()

    def unfreeze(self) -> None:
        self.frozen = False
        for p in self.parameters():
            p.requires_grad = True

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> Dict[str, NDArray]:
        arrays = {}
        for layer in self.layers:
            for p in layer.parameters():
                arrays[p.name] = p.values.copy()
            arrays.update({k: v.copy() for k, v in layer.buffers().items()})
        return arrays

    def load_state_dict(self, arrays: Dict[str, NDArray]) -> None:
        own = {p.name: p.values for layer in self.layers for p in layer.parameters()}
        for layer in self.layers:
            own.update(layer.buffers())
        missing = sorted(set(own) - set(arrays))
        if missing:
            raise DimensionError(f"{self.name}: checkpoint lacks arrays {missing[:3]}")
        for key, target in own.items():
            if arrays[key].shape != target.shape:
                raise DimensionError(f"{self.name}: array '{key}' has shape {arrays[key].shape}, "
                                     f"expected {target.shape}")
            target[...] = arrays[key]
