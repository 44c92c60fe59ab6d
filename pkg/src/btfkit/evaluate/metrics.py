"""PSNR and SSIM in the standard formulations used by the report tables."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, ValidationError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
PSNR_CAP = 99.0


def psnr(a, b, peak: float = 1.0) -> float:
    """10*log10(peak^2 / MSE), clamped to 99 dB (and exactly 99 for MSE 0)."""
    if peak <= 0:
        raise ValidationError(f"peak must be positive, got {peak}")
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"psnr shapes differ: {x.shape} vs {y.shape}")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(10.0 * np.log10(peak * peak / mse), PSNR_CAP)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    offs = np.arange(size) - size // 2
    g = np.exp(-(offs[:, None] ** 2 + offs[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def _channel_ssim(x: np.ndarray, y: np.ndarray, win: np.ndarray,
                  c1: float, c2: float) -> float:
    size = win.shape[0]
    vx = sliding_window_view(x, (size, size))
    vy = sliding_window_view(y, (size, size))
    axes = ((2, 3), (0, 1))
    mu_x = np.tensordot(vx, win, axes=axes)
    mu_y = np.tensordot(vy, win, axes=axes)
    var_x = np.tensordot(vx * vx, win, axes=axes) - mu_x * mu_x
    var_y = np.tensordot(vy * vy, win, axes=axes) - mu_y * mu_y
    cov = np.tensordot(vx * vy, win, axes=axes) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def ssim(a, b, peak: float = 1.0) -> float:
    """Mean local SSIM over valid 11x11 Gaussian windows (sigma 1.5).

    Color inputs average the per-channel values; images smaller than the
    window are rejected.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"ssim shapes differ: {x.shape} vs {y.shape}")
    if x.ndim == 2:
        x, y = x[..., None], y[..., None]
    if x.ndim != 3:
        raise DimensionError(f"ssim expects HxW or HxWxC, got {x.shape}")
    if x.shape[0] < SSIM_WINDOW or x.shape[1] < SSIM_WINDOW:
        raise DimensionError(f"image {x.shape[0]}x{x.shape[1]} is smaller than "
                             f"the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    win = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    vals = [_channel_ssim(x[..., ch], y[..., ch], win, c1, c2)
            for ch in range(x.shape[2])]
    return float(np.mean(vals))
