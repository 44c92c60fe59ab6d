"""Hemisphere directions: angles, vectors, the renderer's disk parameterization.

All angles are degrees. theta is polar (0 = surface normal), phi is azimuth.
Angles are quantized to float32 on construction so that directions survive
the float32 file formats bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class Direction:
    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(np.float32(self.theta)))
        object.__setattr__(self, "phi", float(np.float32(self.phi)))
        if not (0.0 <= self.theta < 90.0):
            raise ValidationError(f"theta must be in [0, 90), got {self.theta}")
        if not (0.0 <= self.phi < 360.0):
            raise ValidationError(f"phi must be in [0, 360), got {self.phi}")


@dataclass(frozen=True)
class DirectionPair:
    camera: Direction
    light: Direction


def direction_to_projected(d: Direction) -> tuple[float, float]:
    """Project onto the tangent plane: (sin θ cos φ, sin θ sin φ), inside the unit disk."""
    t = np.deg2rad(d.theta)
    p = np.deg2rad(d.phi)
    return (float(np.sin(t) * np.cos(p)), float(np.sin(t) * np.sin(p)))


def direction_to_vector(d: Direction) -> np.ndarray:
    """Unit 3-vector, z up."""
    t = np.deg2rad(d.theta)
    p = np.deg2rad(d.phi)
    return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


def angular_distance(a: Direction, b: Direction) -> float:
    """Great-circle angle between two directions, degrees."""
    cos = float(np.clip(direction_to_vector(a) @ direction_to_vector(b), -1.0, 1.0))
    return float(np.rad2deg(np.arccos(cos)))


def pair_distance(a: DirectionPair, b: DirectionPair) -> float:
    return angular_distance(a.camera, b.camera) + angular_distance(a.light, b.light)


DEFAULT_THETAS = (0.0, 15.0, 30.0, 45.0, 60.0, 75.0)
DEFAULT_PHIS = (0.0, 90.0, 180.0, 270.0)


def hemisphere_grid(thetas=DEFAULT_THETAS, phis=DEFAULT_PHIS) -> list[Direction]:
    """Cartesian theta x phi grid (the default 6x4 = 24-direction set)."""
    return [Direction(t, p) for t in thetas for p in phis]


def ring_directions(rings) -> list[Direction]:
    """Directions from (theta, [phis...]) rings, e.g. a sparse 7-direction set."""
    return [Direction(t, p) for t, phis in rings for p in phis]


SPARSE_RINGS_7 = ((0.0, (0.0,)), (37.5, (0.0, 120.0, 240.0)), (75.0, (60.0, 180.0, 300.0)))


def sparse_directions_7() -> list[Direction]:
    """Seven directions covering normal to grazing with staggered azimuths."""
    return ring_directions(SPARSE_RINGS_7)


def pair_product(cameras, lights) -> list[DirectionPair]:
    """All camera x light combinations, camera-major order."""
    return [DirectionPair(c, l) for c in cameras for l in lights]
