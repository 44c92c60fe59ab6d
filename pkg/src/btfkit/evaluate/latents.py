"""Latent-channel visualization: standardize, then a shifted logistic."""

from __future__ import annotations

import numpy as np

from ..model.texture import NeuralTexture


def visualize_latents(texture: NeuralTexture) -> np.ndarray:
    """(D, H, W) images in [0, 1], one per latent channel.

    Each channel is standardized to zero mean / unit variance and mapped
    through 1/(e^(1-c) + 1), taken literally; a constant channel stays at
    c = 0, which lands on 1/(e+1).
    """
    vals = texture.values.astype(np.float64)
    mean = vals.mean(axis=(0, 1))
    std = vals.std(axis=(0, 1))
    safe = np.where(std > 0, std, 1.0)
    c = np.where(std > 0, (vals - mean) / safe, 0.0)
    out = 1.0 / (np.exp(1.0 - c) + 1.0)
    return out.transpose(2, 0, 1).astype(np.float32)
