"""The latent field exchanged between the two networks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class NeuralTexture:
    """H x W x D latent texels; unbounded values, always finite."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.ndim != 3:
            raise ValidationError(f"texture must be HxWxD, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("texture contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def depth(self) -> int:
        return self.values.shape[2]

    @property
    def nbytes(self) -> int:
        return self.values.size * 4
