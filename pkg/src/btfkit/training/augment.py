"""Two-view training-pair sampling with geometric and photometric augmentation.

Both views of a pair share one geometric transform (rescale, then crop, both
with wrap addressing) so they cover the same material region at the same
scale.  Photometric changes (hue rotation, blur, noise) touch only the input
view, which is then tone-mapped to [0, 1) before it reaches the encoder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from ..errors import ConfigError
from ..store.dataset import BtfDataset
from ..store.geometry import DirectionPair


@dataclass(frozen=True)
class AugmentationConfig:
    """Augmentation magnitudes; each range is sampled uniformly per pair.

    crop_size None picks the largest stride multiple that fits every slice
    at the minimum scale, capped at 64 texels.
    """

    crop_size: int | None = None
    scale_range: tuple[float, float] = (0.7, 1.4)
    hue_range: tuple[float, float] = (0.0, 360.0)
    blur_range: tuple[float, float] = (0.0, 1.5)
    noise_range: tuple[float, float] = (0.0, 0.02)
    stride: int = 8

    def __post_init__(self):
        if self.scale_range[0] <= 0 or self.scale_range[1] < self.scale_range[0]:
            raise ConfigError(f"scale_range must be positive and ordered, "
                              f"got {self.scale_range}")
        for name in ("hue_range", "blur_range", "noise_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ConfigError(f"{name} must be ordered and non-negative, got ({lo}, {hi})")
        if self.crop_size is not None and self.crop_size % self.stride:
            raise ConfigError(f"crop_size {self.crop_size} is not a multiple "
                              f"of the encoder stride {self.stride}")


@dataclass(frozen=True)
class TrainingPair:
    """One optimization example: encoder input plus the view it must predict."""

    input_view: np.ndarray    # (crop, crop, 3) float32 in [0, 1), tone-mapped
    target_view: np.ndarray   # (crop, crop, 3) float32 linear HDR
    target_pair: DirectionPair


def resolve_crop_size(cfg: AugmentationConfig, height: int, width: int) -> int:
    """Crop size that fits the dataset at the minimum scale.

    An explicit crop_size that cannot fit raises; None resolves to the
    largest stride multiple <= min(64, smallest scaled side).
    """
    limit = int(min(height, width) * cfg.scale_range[0])
    if cfg.crop_size is not None:
        if cfg.crop_size > limit:
            raise ConfigError(
                f"crop_size {cfg.crop_size} exceeds the {limit}-texel slice "
                f"extent at minimum scale {cfg.scale_range[0]}")
        return cfg.crop_size
    size = (min(64, limit) // cfg.stride) * cfg.stride
    if size < cfg.stride:
        raise ConfigError(f"slices of {height}x{width} are too small to crop "
                          f"at minimum scale {cfg.scale_range[0]}")
    return size


def resample_bilinear_wrap(img: np.ndarray, scale: float) -> np.ndarray:
    """Rescale by a factor with bilinear filtering and wrap addressing.

    Pixel centers are aligned so scale 1 reproduces the input exactly.
    """
    h, w = img.shape[:2]
    oh = max(1, round(h * scale))
    ow = max(1, round(w * scale))
    yy = (np.arange(oh) + 0.5) * (h / oh) - 0.5
    xx = (np.arange(ow) + 0.5) * (w / ow) - 0.5
    y0 = np.floor(yy).astype(int)
    x0 = np.floor(xx).astype(int)
    fy = (yy - y0).astype(img.dtype)[:, None, None]
    fx = (xx - x0).astype(img.dtype)[None, :, None]
    rows0, rows1 = y0 % h, (y0 + 1) % h
    cols0, cols1 = x0 % w, (x0 + 1) % w
    top = img[rows0][:, cols0] * (1 - fx) + img[rows0][:, cols1] * fx
    bottom = img[rows1][:, cols0] * (1 - fx) + img[rows1][:, cols1] * fx
    return top * (1 - fy) + bottom * fy


def crop_wrap(img: np.ndarray, oy: int, ox: int, size: int) -> np.ndarray:
    out = img.take(range(oy, oy + size), axis=0, mode="wrap")
    return out.take(range(ox, ox + size), axis=1, mode="wrap")


def hue_rotation_matrix(degrees: float) -> np.ndarray:
    """Rotation of RGB space about the gray axis (1,1,1)/sqrt(3)."""
    th = math.radians(degrees)
    c, s = math.cos(th), math.sin(th)
    k = 1.0 / math.sqrt(3.0)
    cross = np.array([[0.0, -k, k], [k, 0.0, -k], [-k, k, 0.0]])
    return c * np.eye(3) + s * cross + (1.0 - c) / 3.0 * np.ones((3, 3))


def gaussian_blur_wrap(img: np.ndarray, sigma: float) -> np.ndarray:
    if sigma <= 0:
        return img
    return gaussian_filter(img, sigma=(sigma, sigma, 0.0), mode="wrap")


def tonemap(x: np.ndarray) -> np.ndarray:
    """x / (1 + x): maps [0, inf) onto [0, 1)."""
    return x / (1.0 + x)


def sample_training_pair(dataset: BtfDataset, cfg: AugmentationConfig,
                         rng: np.random.Generator) -> TrainingPair:
    """Draw input/target views with a shared geometric transform.

    Direction pairs for the two views are drawn independently and uniformly.
    The draw order is fixed, so a seeded generator reproduces pairs exactly.
    """
    h, w = dataset.slices[0].pixels.shape[:2]
    crop = resolve_crop_size(cfg, h, w)

    n = len(dataset.slices)
    input_idx = int(rng.integers(n))
    target_idx = int(rng.integers(n))
    scale = float(rng.uniform(*cfg.scale_range))
    sh = max(1, round(h * scale))
    sw = max(1, round(w * scale))
    oy = int(rng.integers(sh))
    ox = int(rng.integers(sw))
    hue = float(rng.uniform(*cfg.hue_range))
    blur = float(rng.uniform(*cfg.blur_range))
    noise_sigma = float(rng.uniform(*cfg.noise_range))
    noise = rng.standard_normal((crop, crop, 3)).astype(np.float32)

    def geometric(pixels: np.ndarray) -> np.ndarray:
        return crop_wrap(resample_bilinear_wrap(pixels, scale), oy, ox, crop)

    target_view = geometric(dataset.slices[target_idx].pixels)
    view = geometric(dataset.slices[input_idx].pixels)
    view = view @ hue_rotation_matrix(hue).T.astype(np.float32)
    view = gaussian_blur_wrap(view, blur)
    view = view + noise_sigma * noise
    # hue rotation and noise can leave the gamut; the tonemap needs x >= 0
    view = np.maximum(view, 0.0)
    return TrainingPair(input_view=tonemap(view).astype(np.float32),
                        target_view=np.ascontiguousarray(target_view, np.float32),
                        target_pair=dataset.pairs[target_idx])
