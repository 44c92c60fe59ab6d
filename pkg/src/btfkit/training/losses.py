"""The three-term reconstruction loss: pixel-wise log L1, style, and frequency.

All components are differentiable through the tape.  Style features come from
a fixed, seeded, randomly initialized convolutional pyramid rather than a
pretrained perceptual network, which keeps the loss dependency-free and
byte-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import engine as ng
from ..engine import Tensor
from ..errors import ValidationError

STYLE_SEED = 1013
STYLE_CHANNELS = (8, 16, 32)


@dataclass(frozen=True)
class LossWeights:
    l1: float = 1.0
    style: float = 0.1
    freq: float = 0.1

    def __post_init__(self):
        if self.l1 < 0 or self.style < 0 or self.freq < 0:
            raise ValidationError("loss weights must be non-negative")
        if self.l1 == self.style == self.freq == 0:
            raise ValidationError("at least one loss weight must be non-zero")


@dataclass(frozen=True)
class LossReport:
    """Per-step component values; total is the weighted sum."""

    total: float
    l1_log: float
    style: float
    freq: float


def _as_nchw(x) -> Tensor:
    """Accept an (N,C,H,W) tensor, an (H,W,C) array, or anything with .pixels."""
    if isinstance(x, Tensor):
        if x.ndim != 4:
            raise ValidationError(f"expected an NCHW tensor, got shape {x.shape}")
        return x
    pixels = getattr(x, "pixels", x)
    arr = np.asarray(pixels, dtype=np.float32)
    if arr.ndim != 3:
        raise ValidationError(f"expected an HxWxC image, got shape {arr.shape}")
    return Tensor(arr.transpose(2, 0, 1)[None])


class StylePyramid:
    """Three strided random convolutions; weights are frozen at construction."""

    def __init__(self, in_channels: int = 3, channels=STYLE_CHANNELS,
                 seed: int = STYLE_SEED):
        rng = np.random.default_rng(seed)
        self.levels = []
        prev = in_channels
        for c in channels:
            self.levels.append(ng.Conv2d(prev, c, 3, rng, stride=2,
                                         padding="circular", trainable=False))
            prev = c

    def features(self, x: Tensor) -> list[Tensor]:
        feats = []
        h = x
        for conv in self.levels:
            h = ng.gelu(conv(h))
            feats.append(h)
        return feats


_default_pyramid: StylePyramid | None = None


def default_pyramid() -> StylePyramid:
    global _default_pyramid
    if _default_pyramid is None:
        _default_pyramid = StylePyramid()
    return _default_pyramid


def gram_matrix(features: Tensor) -> Tensor:
    """(N,C,H,W) -> (N,C,C) channel inner products over C*H*W."""
    n, c, h, w = features.shape
    flat = ng.reshape(features, (n, c, h * w))
    g = ng.matmul(flat, ng.transpose(flat, 1, 2))
    return ng.mul(g, Tensor(1.0 / (c * h * w)))


def loss_l1_log(pred, target) -> Tensor:
    """Mean |log1p(pred) - log1p(target)|; pred is clamped at -0.999."""
    p = pred if isinstance(pred, Tensor) else Tensor(np.asarray(
        getattr(pred, "pixels", pred), np.float32))
    t = target if isinstance(target, Tensor) else Tensor(np.asarray(
        getattr(target, "pixels", target), np.float32))
    return ng.mean(ng.absolute(ng.sub(ng.log1p(ng.clamp(p, lo=-0.999)),
                                      ng.log1p(t))))


def loss_style(pred, target, pyramid: StylePyramid | None = None) -> Tensor:
    """Mean over pyramid levels of the squared Frobenius Gram distance."""
    pyramid = pyramid or default_pyramid()
    p, t = _as_nchw(pred), _as_nchw(target)
    n = p.shape[0]
    total = None
    for fp, ft in zip(pyramid.features(p), pyramid.features(t)):
        diff = ng.sub(gram_matrix(fp), gram_matrix(ft))
        term = ng.mul(ng.sum_(ng.mul(diff, diff)), Tensor(1.0 / n))
        total = term if total is None else ng.add(total, term)
    return ng.mul(total, Tensor(1.0 / len(pyramid.levels)))


def loss_focal_freq(pred, target, alpha: float = 1.0) -> Tensor:
    """Weighted squared spectral distance on the unitary 2D DFT.

    Weights d**alpha / max(d**alpha) are treated as constants, so gradients
    flow only through the spectral difference itself.
    """
    p, t = _as_nchw(pred), _as_nchw(target)
    h, w = p.shape[2], p.shape[3]
    scale = Tensor(1.0 / math.sqrt(h * w))
    diff = ng.sub(ng.mul(ng.dft2(p), scale), ng.mul(ng.dft2(t), scale))
    d2 = ng.sum_(ng.mul(diff, diff), axis=-1)
    d = np.sqrt(np.maximum(d2.data, 0.0))
    mx = d.max(axis=(-2, -1), keepdims=True)
    weight = np.where(mx > 0.0, (d / np.where(mx > 0.0, mx, 1.0)) ** alpha, 0.0)
    return ng.mean(ng.mul(d2, Tensor(weight.astype(np.float32))))


def loss_terms(pred, target, weights: LossWeights = LossWeights(),
               pyramid: StylePyramid | None = None) -> tuple[Tensor, LossReport]:
    """Differentiable weighted total plus the per-component report."""
    l1 = loss_l1_log(pred, target)
    style = loss_style(pred, target, pyramid)
    freq = loss_focal_freq(pred, target)
    total = ng.add(ng.add(ng.mul(l1, Tensor(weights.l1)),
                          ng.mul(style, Tensor(weights.style))),
                   ng.mul(freq, Tensor(weights.freq)))
    report = LossReport(total=float(total.data), l1_log=float(l1.data),
                        style=float(style.data), freq=float(freq.data))
    return total, report


def total_loss(pred, target, weights: LossWeights = LossWeights(),
               pyramid: StylePyramid | None = None) -> LossReport:
    return loss_terms(pred, target, weights, pyramid)[1]
