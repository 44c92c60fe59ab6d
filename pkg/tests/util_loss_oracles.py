"""Frozen reference evaluators for the training losses.

Deliberately slow and literal: scalar loops and an O(N^4) DFT, written once
before the vectorized losses and never revised to match them.
"""

import cmath
import math

import numpy as np


def l1_log_reference(pred, target) -> float:
    """Mean |log1p(pred) - log1p(target)| via an explicit scalar loop."""
    p = np.asarray(pred, dtype=np.float64).ravel()
    t = np.asarray(target, dtype=np.float64).ravel()
    assert p.shape == t.shape
    total = 0.0
    for a, b in zip(p, t):
        a = max(float(a), -0.999)
        total += abs(math.log1p(a) - math.log1p(float(b)))
    return total / p.size


def gram_reference(features) -> np.ndarray:
    """Channel Gram matrix of a (C, H, W) stack via double-loop inner products.

    Entry (i, j) is the full spatial inner product of channels i and j,
    divided by channels * pixels.
    """
    f = np.asarray(features, dtype=np.float64)
    c = f.shape[0]
    n = f[0].size
    flat = f.reshape(c, n)
    g = np.zeros((c, c))
    for i in range(c):
        for j in range(c):
            acc = 0.0
            for k in range(n):
                acc += float(flat[i, k]) * float(flat[j, k])
            g[i, j] = acc / (c * n)
    return g


def _unitary_dft2(img: np.ndarray) -> np.ndarray:
    """O(N^4) unitary 2D DFT of one (H, W) channel, by direct summation."""
    h, w = img.shape
    out = np.zeros((h, w), dtype=complex)
    for u in range(h):
        for v in range(w):
            acc = 0.0 + 0.0j
            for y in range(h):
                for x in range(w):
                    ang = -2.0 * math.pi * (u * y / h + v * x / w)
                    acc += float(img[y, x]) * cmath.exp(1j * ang)
            out[u, v] = acc / math.sqrt(h * w)
    return out


def focal_freq_reference(pred, target, alpha: float = 1.0) -> float:
    """Frequency loss on (H, W, C) images via the naive DFT.

    Per channel: d = |F_pred - F_target| on the unitary spectrum, weights
    d**alpha normalized by their channel max (all-zero d gives zero weights),
    loss = mean over bins and channels of w * d**2.
    """
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    assert p.shape == t.shape and p.ndim == 3
    h, w, c = p.shape
    total = 0.0
    for ch in range(c):
        d = np.abs(_unitary_dft2(p[..., ch]) - _unitary_dft2(t[..., ch]))
        mx = d.max()
        weight = (d / mx) ** alpha if mx > 0 else np.zeros_like(d)
        total += float((weight * d * d).sum())
    return total / (h * w * c)
