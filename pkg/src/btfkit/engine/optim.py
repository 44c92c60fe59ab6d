"""Adam optimizer with bias correction, plus the cosine learning-rate schedule."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DimensionError
from .core import Tensor


class AdamState:
    """Per-parameter first/second moment buffers and step counter."""

    def __init__(self, params: list[Tensor], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if not params:
            raise ConfigError("AdamState needs at least one parameter")
        self.params = list(params)
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]
        self.step = 0
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps


def adam_step(params: list[Tensor], grads: list[np.ndarray], state: AdamState) -> None:
    """One bias-corrected Adam update, applied in place."""
    if params is not state.params and list(params) != state.params:
        raise ConfigError("adam_step called with parameters that do not match the state")
    if len(grads) != len(state.params):
        raise DimensionError(f"got {len(grads)} grads for {len(state.params)} params")
    state.step += 1
    t = state.step
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    for p, g, m, v in zip(state.params, grads, state.m, state.v):
        if g is None:
            continue
        if g.shape != p.data.shape:
            raise DimensionError(f"grad shape {g.shape} does not match param {p.data.shape}")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p.data -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def cosine_lr(step: int, total_steps: int, lr_start: float, lr_end: float) -> float:
    """Cosine decay from lr_start to lr_end over total_steps."""
    if total_steps <= 1:
        return lr_end
    frac = min(max(step / (total_steps - 1), 0.0), 1.0)
    return lr_end + 0.5 * (lr_start - lr_end) * (1.0 + np.cos(np.pi * frac))
