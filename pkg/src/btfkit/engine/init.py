"""Weight initializers: orthogonal (autoencoder) and sinusoidal-net scheme (renderer)."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .core import DEFAULT_DTYPE, Tensor


def init_orthogonal(shape, rng: np.random.Generator, gain: float = 1.0) -> Tensor:
    """Orthogonal weight tensor: rows (or columns, whichever is smaller) are orthonormal.

    Tensors with more than 2 axes are treated as (shape[0], prod(shape[1:])).
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2:
        raise ConfigError(f"orthogonal init needs a 2D-reshapeable shape, got {shape}")
    rows, cols = shape[0], int(np.prod(shape[1:]))
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))  # fix per-column sign so the draw is uniform
    if rows < cols:
        q = q.T
    w = (gain * q[:rows, :cols]).astype(DEFAULT_DTYPE)
    return Tensor(w.reshape(shape), requires_grad=True)


def siren_bound(layer_index: int, fan_in: int, omega0: float) -> float:
    """Uniform bound for sinusoidal-network weights at a given depth."""
    if layer_index == 0:
        return 1.0 / fan_in
    return float(np.sqrt(6.0 / fan_in) / omega0)


def init_siren(layer_index: int, fan_in: int, omega0: float, rng: np.random.Generator,
               shape=None) -> Tensor:
    """Sinusoidal-MLP initializer: U(-1/n, 1/n) for the first layer,
    U(-sqrt(6/n)/omega0, +sqrt(6/n)/omega0) for deeper ones."""
    if shape is None:
        raise ConfigError("init_siren requires an explicit weight shape")
    bound = siren_bound(layer_index, fan_in, omega0)
    w = rng.uniform(-bound, bound, size=tuple(shape)).astype(DEFAULT_DTYPE)
    return Tensor(w, requires_grad=True)
