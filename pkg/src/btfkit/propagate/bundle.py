"""Deployable neural BTF bundles: propagation, UV queries, tiling, multires.

A bundle pairs one neural texture with the trained reflectance decoder.  The
decoder is pointwise over texels, so everything spatial about the bundle
(tiling, shifting, resolution) is a property of the texture alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, ValidationError
from ..model.autoencoder import Autoencoder, encode
from ..model.checkpoint import load_checkpoint
from ..model.renderer import RendererMlp, render_point, render_slice
from ..model.texture import NeuralTexture
from ..store.geometry import Direction, DirectionPair

TRAINED_SCALE_RANGE = (0.7, 1.4)


@dataclass(frozen=True)
class NeuralBtf:
    """Immutable texture + decoder pair, queryable like a regular BTF."""

    texture: NeuralTexture
    renderer: RendererMlp
    texel_size: float = 1.0
    wrap: str = "repeat"

    def __post_init__(self):
        if self.texture.depth != self.renderer.depth:
            raise ValidationError(
                f"texture depth {self.texture.depth} does not match the "
                f"renderer latent dim {self.renderer.depth}")
        if self.wrap != "repeat":
            raise ValidationError(f"unsupported wrap mode {self.wrap!r}")
        object.__setattr__(self, "texel_size", float(np.float32(self.texel_size)))


def _resolve_ckpt(ckpt) -> tuple[Autoencoder, RendererMlp]:
    if isinstance(ckpt, (tuple, list)) and len(ckpt) >= 2:
        return ckpt[0], ckpt[1]
    if hasattr(ckpt, "autoencoder") and hasattr(ckpt, "renderer"):
        return ckpt.autoencoder, ckpt.renderer
    autoencoder, renderer, _ = load_checkpoint(ckpt)
    return autoencoder, renderer


def propagate(ckpt, guidance, texel_size: float | None = None) -> NeuralBtf:
    """Encode a guidance image into a bundle; no re-training involved.

    ckpt may be a checkpoint path, an (autoencoder, renderer) pair, or a
    train result.  The texture keeps the guidance resolution.
    """
    autoencoder, renderer = _resolve_ckpt(ckpt)
    if texel_size is None:
        texel_size = getattr(guidance, "texel_size", None) or 1.0
    texture = encode(autoencoder, guidance)
    return NeuralBtf(texture=texture, renderer=renderer, texel_size=texel_size)


def query(nb: NeuralBtf, u: float, v: float, cam: Direction,
          light: Direction) -> np.ndarray:
    """RGB at UV coordinates: bilinear latent fetch with wrap, then decode.

    u indexes columns and v rows; both wrap modulo 1, and texel centers sit
    at (j + 0.5) / extent.
    """
    vals = nb.texture.values
    h, w = nb.texture.height, nb.texture.width
    x = (u % 1.0) * w - 0.5
    y = (v % 1.0) * h - 0.5
    x0, y0 = math.floor(x), math.floor(y)
    tx = np.float32(x - x0)
    ty = np.float32(y - y0)
    xa, xb = x0 % w, (x0 + 1) % w
    ya, yb = y0 % h, (y0 + 1) % h
    top = vals[ya, xa] * (1 - tx) + vals[ya, xb] * tx
    bottom = vals[yb, xa] * (1 - tx) + vals[yb, xb] * tx
    latent = top * (1 - ty) + bottom * ty
    return render_point(nb.renderer, latent, cam, light)


def make_tileable(ckpt, tileable_guidance) -> NeuralBtf:
    """Propagate guidance the caller declares cyclic.

    Same code path as propagate: circular padding plus shift equivariance
    make the texture of a cyclic guidance itself cyclic, which is all that
    repeat addressing needs.  Check seam_metric / tiled renders to verify.
    """
    return propagate(ckpt, tileable_guidance)


def seam_metric(nb: NeuralBtf, pair: DirectionPair) -> float:
    """Max RGB deviation after moving the texture seams to the center.

    The decoder is pointwise, so this is ~0 for every bundle; a large value
    would indicate the decode path leaks spatial context.
    """
    h, w = nb.texture.height, nb.texture.width
    dy, dx = h // 2, w // 2
    base = render_slice(nb.renderer, nb.texture, pair).pixels
    shifted = NeuralTexture(np.roll(nb.texture.values, (dy, dx), axis=(0, 1)))
    moved = render_slice(nb.renderer, shifted, pair).pixels
    return float(np.abs(base - np.roll(moved, (-dy, -dx), axis=(0, 1))).max())


def area_downsample(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box-filter resample to an arbitrary smaller size via overlap weights."""

    def axis_weights(n_in: int, n_out: int) -> np.ndarray:
        k = n_in / n_out
        rows = np.arange(n_out)[:, None]
        cells = np.arange(n_in)[None, :]
        overlap = np.minimum((rows + 1) * k, cells + 1) - np.maximum(rows * k, cells)
        return np.maximum(overlap, 0.0) / k

    wy = axis_weights(pixels.shape[0], out_h)
    wx = axis_weights(pixels.shape[1], out_w)
    out = np.einsum("oy,yxc,px->opc", wy, pixels.astype(np.float64), wx)
    return out.astype(np.float32)


def make_multires(ckpt, guidance, scale: float) -> NeuralBtf:
    """Propagate an area-downsampled copy of the guidance.

    Scales below the trained rescale range still produce a bundle but emit
    a warning; quality is only vouched for inside that range.
    """
    if not 0.0 < scale <= 1.0:
        raise ConfigError(f"scale must be in (0, 1], got {scale}")
    autoencoder, renderer = _resolve_ckpt(ckpt)
    if scale == 1.0:
        return propagate((autoencoder, renderer), guidance)
    pixels = np.asarray(getattr(guidance, "pixels", guidance), np.float32)
    stride = autoencoder.config.total_stride
    out_h, out_w = round(pixels.shape[0] * scale), round(pixels.shape[1] * scale)
    if out_h < stride or out_w < stride:
        raise DimensionError(f"scale {scale} shrinks guidance below one "
                             f"{stride}-texel stride unit ({out_h}x{out_w})")
    if out_h % stride or out_w % stride:
        raise DimensionError(f"scaled dims {out_h}x{out_w} are not multiples "
                             f"of the stride {stride}")
    if scale < TRAINED_SCALE_RANGE[0]:
        warnings.warn(f"scale {scale} is below the trained rescale range "
                      f"{TRAINED_SCALE_RANGE}; results may drift from the "
                      f"full-resolution appearance", stacklevel=2)
    small = area_downsample(pixels, out_h, out_w)
    texel = (getattr(guidance, "texel_size", None) or 1.0) / scale
    return propagate((autoencoder, renderer), small, texel_size=texel)
