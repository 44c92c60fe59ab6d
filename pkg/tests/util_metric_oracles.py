"""Frozen reference implementations of the image metrics.

Scalar loops over pixels and window positions, written before the vectorized
metrics and kept independent of them.
"""

import math

import numpy as np


def psnr_reference(a, b, peak: float) -> float:
    """10*log10(peak^2 / MSE) with an explicit accumulation loop; 99 dB cap."""
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    assert x.shape == y.shape
    acc = 0.0
    for p, q in zip(x, y):
        acc += (float(p) - float(q)) ** 2
    mse = acc / x.size
    if mse == 0.0:
        return 99.0
    return min(10.0 * math.log10(peak * peak / mse), 99.0)


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = size // 2
    g = np.zeros((size, size))
    for i in range(size):
        for j in range(size):
            g[i, j] = math.exp(-((i - half) ** 2 + (j - half) ** 2) / (2 * sigma * sigma))
    return g / g.sum()


def ssim_reference(a, b, peak: float = 1.0) -> float:
    """Mean local SSIM over valid 11x11 windows, one window position at a time.

    Gaussian weights sigma 1.5, C1=(0.01*peak)^2, C2=(0.03*peak)^2; color
    images average the per-channel results.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    assert x.shape == y.shape
    if x.ndim == 2:
        x = x[..., None]
        y = y[..., None]
    h, w, channels = x.shape
    win = _gaussian_window()
    size = win.shape[0]
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    per_channel = []
    for ch in range(channels):
        vals = []
        for oy in range(h - size + 1):
            for ox in range(w - size + 1):
                pa = x[oy:oy + size, ox:ox + size, ch]
                pb = y[oy:oy + size, ox:ox + size, ch]
                mu_a = float((win * pa).sum())
                mu_b = float((win * pb).sum())
                var_a = float((win * pa * pa).sum()) - mu_a * mu_a
                var_b = float((win * pb * pb).sum()) - mu_b * mu_b
                cov = float((win * pa * pb).sum()) - mu_a * mu_b
                num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
                den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
                vals.append(num / den)
        per_channel.append(sum(vals) / len(vals))
    return sum(per_channel) / channels
