"""Synthetic ground truth: SVBRDF parameter maps shaded into a tabulated BTF.

Shading model per texel, directional light of unit irradiance times an
exposure factor:
  radiance = intensity * (albedo/pi + specular * D*G*F / (4 cos_o cos_i)) * cos_i
with GGX distribution D (alpha = roughness), separable Smith G, Schlick F
(F0 = 0.04), and radiance 0 at or below the shading horizon.

intensity = 1 keeps the closed forms (Lambertian slice = albedo/pi * cos).
Captured BTFs are exposure-calibrated, so the presets shoot at
WHITE_EXPOSURE = pi, which puts a white diffuse texel at normal incidence
exactly at radiance 1.0; without it the 1/pi BRDF normalization leaves
every slice in the bottom of the tonemapped range.

The bundled parameter-map presets are periodic in both axes, so the
generated BTFs tile exactly; that matches the circularly-padded networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .dataset import BtfDataset, BtfSlice
from .geometry import DirectionPair, direction_to_vector

F0 = 0.04
WHITE_EXPOSURE = float(np.pi)


@dataclass(frozen=True)
class SvbrdfMaps:
    """albedo HxWx3, normal HxWx3 (unit), roughness HxW in (0,1], specular HxW."""

    albedo: np.ndarray
    normal: np.ndarray
    roughness: np.ndarray
    specular: np.ndarray

    def __post_init__(self):
        albedo = np.asarray(self.albedo, dtype=np.float32)
        normal = np.asarray(self.normal, dtype=np.float32)
        roughness = np.asarray(self.roughness, dtype=np.float32)
        specular = np.asarray(self.specular, dtype=np.float32)
        hw = albedo.shape[:2]
        if albedo.ndim != 3 or albedo.shape[2] != 3:
            raise ValidationError(f"albedo must be HxWx3, got {albedo.shape}")
        if normal.shape != albedo.shape:
            raise ValidationError("normal map dimensions differ from albedo")
        if roughness.shape != hw or specular.shape != hw:
            raise ValidationError("roughness/specular dimensions differ from albedo")
        norms = np.linalg.norm(normal, axis=2)
        if np.any(norms < 1e-6):
            raise ValidationError("zero-length normal in normal map")
        if np.any(np.abs(norms - 1.0) > 1e-3):
            raise ValidationError("normals must be unit length")
        if np.any(roughness <= 0.0) or np.any(roughness > 1.0):
            raise ValidationError("roughness must lie in (0, 1]")
        object.__setattr__(self, "albedo", albedo)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "roughness", roughness)
        object.__setattr__(self, "specular", specular)

    @property
    def height(self) -> int:
        return self.albedo.shape[0]

    @property
    def width(self) -> int:
        return self.albedo.shape[1]


def _shade(maps: SvbrdfMaps, wo: np.ndarray, wi: np.ndarray) -> np.ndarray:
    n = maps.normal.astype(np.float64)
    cos_o = n @ wo
    cos_i = n @ wi
    lit = (cos_o > 0.0) & (cos_i > 0.0)
    h = wo + wi
    h = h / np.linalg.norm(h)
    n_dot_h = n @ h
    a = maps.roughness.astype(np.float64)
    a2 = a * a
    denom = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0
    d = a2 / (np.pi * denom * denom)
    safe_o = np.maximum(cos_o, 1e-9)
    safe_i = np.maximum(cos_i, 1e-9)
    g = (2.0 * safe_o / (safe_o + np.sqrt(a2 + (1.0 - a2) * safe_o * safe_o))
         * 2.0 * safe_i / (safe_i + np.sqrt(a2 + (1.0 - a2) * safe_i * safe_i)))
    f = F0 + (1.0 - F0) * (1.0 - float(h @ wi)) ** 5
    spec = maps.specular * d * g * f / (4.0 * safe_o * safe_i)
    radiance = (maps.albedo.astype(np.float64) / np.pi + spec[:, :, None]) * cos_i[:, :, None]
    radiance[~lit] = 0.0
    return np.maximum(radiance, 0.0).astype(np.float32)


def render_synthetic_btf(maps: SvbrdfMaps, pairs, texel_size: float = 1.0,
                         intensity: float = 1.0) -> BtfDataset:
    if intensity <= 0.0:
        raise ValidationError(f"intensity must be positive, got {intensity}")
    slices = []
    for pair in pairs:
        wo = direction_to_vector(pair.camera)
        wi = direction_to_vector(pair.light)
        slices.append(BtfSlice(np.float32(intensity) * _shade(maps, wo, wi)))
    return BtfDataset(height=maps.height, width=maps.width, texel_size=texel_size,
                      pairs=tuple(pairs), slices=tuple(slices))


# -- parameter-map presets ---------------------------------------------------


def lambertian_maps(height: int, width: int, albedo=(0.6, 0.6, 0.6)) -> SvbrdfMaps:
    """Pure diffuse, flat normals: radiance has the closed form albedo/pi * cos."""
    flat = np.zeros((height, width, 3), dtype=np.float32)
    flat[:, :, 2] = 1.0
    return SvbrdfMaps(
        albedo=np.broadcast_to(np.asarray(albedo, np.float32), (height, width, 3)).copy(),
        normal=flat,
        roughness=np.full((height, width), 0.5, dtype=np.float32),
        specular=np.zeros((height, width), dtype=np.float32),
    )


def textured_maps(height: int, width: int, seed: int = 0) -> SvbrdfMaps:
    """Periodic spatially-varying material: color blobs, sinusoidal bumps,
    roughness bands. Every map has integer cycle counts, so it tiles."""
    rng = np.random.default_rng(seed)
    v, u = np.meshgrid(np.arange(height) / height, np.arange(width) / width,
                       indexing="ij")
    tau = 2.0 * np.pi

    def cyclic_field(k_max, n_waves):
        field = np.zeros((height, width))
        for _ in range(n_waves):
            kx, ky = rng.integers(-k_max, k_max + 1, 2)
            phase = rng.uniform(0, tau)
            field += rng.uniform(0.5, 1.0) * np.cos(tau * (kx * u + ky * v) + phase)
        span = field.max() - field.min()
        return (field - field.min()) / max(span, 1e-9)

    blend = cyclic_field(3, 6)
    color_a = rng.uniform(0.15, 0.9, 3)
    color_b = rng.uniform(0.15, 0.9, 3)
    albedo = (blend[:, :, None] * color_a + (1.0 - blend[:, :, None]) * color_b)

    # analytic-gradient sinusoidal height field keeps normals exact and periodic
    amp, kx, ky = 0.18, 2, 3
    dz_du = -amp * tau * kx * np.sin(tau * (kx * u + ky * v))
    dz_dv = -amp * tau * ky * np.sin(tau * (kx * u + ky * v))
    normal = np.stack([-dz_du, -dz_dv, np.ones_like(u)], axis=2)
    normal /= np.linalg.norm(normal, axis=2, keepdims=True)

    roughness = 0.2 + 0.6 * cyclic_field(2, 4)
    specular = 0.2 + 0.5 * cyclic_field(2, 4)
    return SvbrdfMaps(albedo=albedo.astype(np.float32),
                      normal=normal.astype(np.float32),
                      roughness=roughness.astype(np.float32),
                      specular=specular.astype(np.float32))
