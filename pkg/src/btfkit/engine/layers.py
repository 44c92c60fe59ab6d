"""Parameter-holding layers built on the functional ops.

A Layer is a plain object whose Tensor attributes (and nested Layers) are
collected by name for checkpoints and optimizers. Collection order follows
attribute definition order, so it is deterministic for a fixed architecture.
"""

from __future__ import annotations

import numpy as np

from .core import Tensor
from . import nnops
from .init import init_orthogonal, init_siren


class Layer:
    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, val in vars(self).items():
            key = f"{prefix}{name}"
            if isinstance(val, Tensor):
                if val.requires_grad:
                    out[key] = val
            elif isinstance(val, Layer):
                out.update(val.named_parameters(f"{key}."))
            elif isinstance(val, (list, tuple)):
                for i, item in enumerate(val):
                    if isinstance(item, Layer):
                        out.update(item.named_parameters(f"{key}.{i}."))
        return out

    def parameters(self) -> list[Tensor]:
        return list(self.named_parameters().values())


class Conv2d(Layer):
    """Convolution layer; init is "orthogonal" or ("siren", layer_index)."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int,
                 rng: np.random.Generator, stride: int = 1, groups: int = 1,
                 padding: str = "circular", init="orthogonal", bias: bool = True,
                 omega0: float = 30.0, trainable: bool = True):
        shape = (out_channels, in_channels // groups, kernel, kernel)
        if init == "orthogonal":
            self.weight = init_orthogonal(shape, rng)
        else:
            _, layer_index = init
            fan_in = (in_channels // groups) * kernel * kernel
            self.weight = init_siren(layer_index, fan_in, omega0, rng, shape)
        self.weight.requires_grad = trainable
        self.bias = None
        if bias:
            self.bias = Tensor(np.zeros(out_channels, dtype=np.float32), requires_grad=trainable)
        self.stride = stride
        self.groups = groups
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return nnops.conv2d(x, self.weight, self.bias, stride=self.stride,
                            padding=self.padding, groups=self.groups)


class LayerNorm(Layer):
    def __init__(self, channels: int, axis: int = 1, eps: float = 1e-5,
                 gamma_init: float = 1.0):
        self.gamma = Tensor(np.full(channels, gamma_init, dtype=np.float32), requires_grad=True)
        self.beta = Tensor(np.zeros(channels, dtype=np.float32), requires_grad=True)
        self.axis = axis
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return nnops.layer_norm(x, self.gamma, self.beta, axis=self.axis, eps=self.eps)
