"""Tabulated BTF data: one HDR slice per (camera, light) direction pair."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PairLookupError, ValidationError
from .geometry import DirectionPair, pair_distance


@dataclass(frozen=True)
class BtfSlice:
    """One H x W x 3 linear-radiance image (unbounded above, never negative)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float32)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValidationError(f"slice must be HxWx3, got {px.shape}")
        if not np.all(np.isfinite(px)):
            raise ValidationError("slice contains non-finite radiance")
        if np.any(px < 0):
            raise ValidationError("slice contains negative radiance")
        object.__setattr__(self, "pixels", px)


@dataclass(frozen=True)
class BtfDataset:
    height: int
    width: int
    texel_size: float  # mm per texel
    pairs: tuple[DirectionPair, ...]
    slices: tuple[BtfSlice, ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "slices", tuple(self.slices))
        # quantize so a value that came out of a float32 file goes back in unchanged
        object.__setattr__(self, "texel_size", float(np.float32(self.texel_size)))
        if len(self.slices) < 1:
            raise ValidationError("dataset needs at least one slice")
        if len(self.pairs) != len(self.slices):
            raise ValidationError(
                f"{len(self.pairs)} pairs but {len(self.slices)} slices")
        if len(set(self.pairs)) != len(self.pairs):
            raise ValidationError("direction pairs must be unique")
        for s in self.slices:
            if s.pixels.shape[:2] != (self.height, self.width):
                raise ValidationError(
                    f"slice shape {s.pixels.shape[:2]} != dataset "
                    f"({self.height}, {self.width})")

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def raw_bytes(self) -> int:
        """Uncompressed float32 payload size, the compression-ratio numerator."""
        return self.n_pairs * self.height * self.width * 3 * 4


def get_slice(dataset: BtfDataset, pair: DirectionPair) -> BtfSlice:
    """Exact-match lookup; a miss reports the nearest sampled pair."""
    for p, s in zip(dataset.pairs, dataset.slices):
        if p == pair:
            return s
    nearest = min(dataset.pairs, key=lambda p: pair_distance(p, pair))
    raise PairLookupError(
        f"pair cam(θ={pair.camera.theta}, φ={pair.camera.phi}) "
        f"light(θ={pair.light.theta}, φ={pair.light.phi}) not sampled; "
        f"nearest is cam(θ={nearest.camera.theta}, φ={nearest.camera.phi}) "
        f"light(θ={nearest.light.theta}, φ={nearest.light.phi})")
