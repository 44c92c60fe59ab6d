"""Guidance-image encoder: a small U-Net that emits the latent texture.

Fully convolutional with circular padding throughout, so the whole network
commutes with cyclic shifts at multiples of the total stride; that is the
mechanism behind tileable outputs. Blocks are ConvNeXt-style (depthwise 5x5,
layer norm, pointwise expand x4, GELU, pointwise project, learned residual
scale), downsampling is a stride-2 depthwise conv plus a 1x1 widening conv,
upsampling is nearest-neighbor plus a 1x1 conv, and skip connections enter
through 1x1 convs. The bottleneck carries a channel+spatial attention pair;
both attention paths are shift-safe (global pooling, pointwise/circular ops).
All weights start orthogonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import engine as ng
from ..errors import DimensionError
from ..store.images import GuidanceImage
from .texture import NeuralTexture


@dataclass(frozen=True)
class AutoencoderConfig:
    widths: tuple[int, int, int] = (16, 32, 64)
    depth: int = 14  # latent channels D
    kernel: int = 5
    expand: int = 4
    residual_scale: float = 0.1
    attention_reduce: int = 4

    @property
    def total_stride(self) -> int:
        return 2 ** len(self.widths)


class ConvNextBlock(ng.Layer):
    def __init__(self, channels: int, cfg: AutoencoderConfig, rng):
        self.spatial = ng.Conv2d(channels, channels, cfg.kernel, rng, groups=channels)
        self.norm = ng.LayerNorm(channels)
        self.expand = ng.Conv2d(channels, channels * cfg.expand, 1, rng)
        self.project = ng.Conv2d(channels * cfg.expand, channels, 1, rng)
        self.scale = ng.Tensor(np.full((1, channels, 1, 1), cfg.residual_scale,
                                       dtype=np.float32), requires_grad=True)

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        h = self.project(ng.gelu(self.expand(self.norm(self.spatial(x)))))
        return x + h * self.scale


class Downsample(ng.Layer):
    def __init__(self, in_ch: int, out_ch: int, cfg: AutoencoderConfig, rng):
        self.spatial = ng.Conv2d(in_ch, in_ch, cfg.kernel, rng, stride=2, groups=in_ch)
        self.widen = ng.Conv2d(in_ch, out_ch, 1, rng)

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        return self.widen(self.spatial(x))


class Upsample(ng.Layer):
    def __init__(self, in_ch: int, out_ch: int, rng):
        self.narrow = ng.Conv2d(in_ch, out_ch, 1, rng)

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        return self.narrow(ng.upsample_nearest(x, 2))


class AttentionBlock(ng.Layer):
    """Channel gate from pooled statistics, then a spatial gate from a 7x7 conv."""

    def __init__(self, channels: int, cfg: AutoencoderConfig, rng):
        squeeze = max(channels // cfg.attention_reduce, 1)
        self.channel_in = ng.Conv2d(channels, squeeze, 1, rng)
        self.channel_out = ng.Conv2d(squeeze, channels, 1, rng)
        self.spatial = ng.Conv2d(2, 1, 7, rng)

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        avg = ng.mean(x, axis=(2, 3), keepdims=True)
        peak = ng.amax(x, axis=(2, 3), keepdims=True)
        mlp = lambda v: self.channel_out(ng.gelu(self.channel_in(v)))
        x = x * ng.sigmoid(mlp(avg) + mlp(peak))
        stats = ng.concat([ng.mean(x, axis=1, keepdims=True),
                           ng.amax(x, axis=1, keepdims=True)], axis=1)
        return x * ng.sigmoid(self.spatial(stats))


class Autoencoder(ng.Layer):
    def __init__(self, rng: np.random.Generator, config: AutoencoderConfig | None = None):
        cfg = config or AutoencoderConfig()
        self.config = cfg
        w0, w1, w2 = cfg.widths
        self.stem = ng.Conv2d(3, w0, 1, rng)
        self.enc0 = ConvNextBlock(w0, cfg, rng)
        self.down0 = Downsample(w0, w1, cfg, rng)
        self.enc1 = ConvNextBlock(w1, cfg, rng)
        self.down1 = Downsample(w1, w2, cfg, rng)
        self.enc2 = ConvNextBlock(w2, cfg, rng)
        self.down2 = Downsample(w2, w2, cfg, rng)
        self.mid0 = ConvNextBlock(w2, cfg, rng)
        self.attention = AttentionBlock(w2, cfg, rng)
        self.mid1 = ConvNextBlock(w2, cfg, rng)
        self.up2 = Upsample(w2, w2, rng)
        self.skip2 = ng.Conv2d(w2, w2, 1, rng)
        self.dec2 = ConvNextBlock(w2, cfg, rng)
        self.up1 = Upsample(w2, w1, rng)
        self.skip1 = ng.Conv2d(w1, w1, 1, rng)
        self.dec1 = ConvNextBlock(w1, cfg, rng)
        self.up0 = Upsample(w1, w0, rng)
        self.skip0 = ng.Conv2d(w0, w0, 1, rng)
        self.dec0 = ConvNextBlock(w0, cfg, rng)
        self.head = ng.Conv2d(w0, cfg.depth, 1, rng)

    def forward(self, x: ng.Tensor) -> ng.Tensor:
        """(N, 3, H, W) -> (N, D, H, W); H, W must be multiples of the stride."""
        stride = self.config.total_stride
        h, w = x.shape[2], x.shape[3]
        if h % stride or w % stride:
            raise DimensionError(
                f"input is {h}x{w}; both sides must be multiples of {stride}")
        e0 = self.enc0(self.stem(x))
        e1 = self.enc1(self.down0(e0))
        e2 = self.enc2(self.down1(e1))
        m = self.mid1(self.attention(self.mid0(self.down2(e2))))
        d2 = self.dec2(self.up2(m) + self.skip2(e2))
        d1 = self.dec1(self.up1(d2) + self.skip1(e1))
        d0 = self.dec0(self.up0(d1) + self.skip0(e0))
        return self.head(d0)

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        return self.forward(x)


def encode(model: Autoencoder, image) -> NeuralTexture:
    """Guidance image -> latent texture (inference path, no gradients)."""
    if isinstance(image, GuidanceImage):
        pixels = image.pixels
    elif isinstance(image, ng.Tensor):
        pixels = image.data
    else:
        pixels = np.asarray(image, dtype=np.float32)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise DimensionError(f"guidance must be HxWx3, got {pixels.shape}")
    x = ng.Tensor(pixels.transpose(2, 0, 1)[None])
    out = model.forward(x)
    return NeuralTexture(out.data[0].transpose(1, 2, 0))
