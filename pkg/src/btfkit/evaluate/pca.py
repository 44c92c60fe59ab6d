"""Linear dimensionality-reduction baseline for the compression comparison."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..store.dataset import BtfDataset
from .metrics import psnr


def pca_baseline(dataset: BtfDataset, rank: int) -> tuple[float, int]:
    """Truncated-SVD reconstruction of the slice stack.

    The BTF is flattened to an (n_slices, H*W*3) matrix and centered; PSNR is
    measured in the linear domain with the dataset maximum as peak, so the
    SVD optimality argument (non-decreasing PSNR in rank) applies directly.
    Storage is rank * (n_slices + H*W*3) float32 values.
    """
    n = len(dataset.slices)
    if not 1 <= rank <= n:
        raise ConfigError(f"rank must be in [1, {n}], got {rank}")
    stack = np.stack([s.pixels for s in dataset.slices]).astype(np.float64)
    matrix = stack.reshape(n, -1)
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    approx = (u[:, :rank] * s[:rank]) @ vt[:rank] + mean
    peak = float(stack.max()) or 1.0
    quality = psnr(matrix, approx, peak=peak)
    storage = rank * (n + matrix.shape[1]) * 4
    return quality, storage
