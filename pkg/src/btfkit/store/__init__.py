"""BTF data model, container formats, direction geometry, and synthetic data."""

from .dataset import BtfDataset, BtfSlice, get_slice
from .geometry import (
    DEFAULT_PHIS,
    DEFAULT_THETAS,
    Direction,
    DirectionPair,
    angular_distance,
    direction_to_projected,
    direction_to_vector,
    hemisphere_grid,
    pair_distance,
    pair_product,
    ring_directions,
    sparse_directions_7,
)
from .images import (
    DEFAULT_STRIDE,
    GuidanceImage,
    linear_to_srgb,
    load_guidance,
    read_pfm,
    save_image,
    srgb_to_linear,
    write_pfm,
)
from .nbtf import load_btf, save_btf
from .synth import (WHITE_EXPOSURE, SvbrdfMaps, lambertian_maps,
                    render_synthetic_btf, textured_maps)

__all__ = [
    "BtfDataset", "BtfSlice", "get_slice",
    "Direction", "DirectionPair", "angular_distance", "direction_to_projected",
    "direction_to_vector", "hemisphere_grid", "pair_distance", "pair_product",
    "ring_directions", "sparse_directions_7", "DEFAULT_THETAS", "DEFAULT_PHIS",
    "GuidanceImage", "DEFAULT_STRIDE", "load_guidance", "save_image",
    "srgb_to_linear", "linear_to_srgb", "read_pfm", "write_pfm",
    "load_btf", "save_btf",
    "SvbrdfMaps", "WHITE_EXPOSURE", "render_synthetic_btf", "lambertian_maps",
    "textured_maps",
]
