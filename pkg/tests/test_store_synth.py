"""Synthetic BTF generator against the frozen scalar BRDF oracle."""

import math

import numpy as np
import pytest

from btfkit.errors import ValidationError
from btfkit.store import (
    Direction,
    DirectionPair,
    SvbrdfMaps,
    get_slice,
    hemisphere_grid,
    lambertian_maps,
    pair_product,
    render_synthetic_btf,
    textured_maps,
)
from util_brdf_oracle import radiance as oracle_radiance


def test_lambertian_normal_incidence():
    maps = lambertian_maps(4, 4, albedo=(0.6, 0.6, 0.6))
    pair = DirectionPair(Direction(0, 0), Direction(0, 0))
    ds = render_synthetic_btf(maps, [pair])
    np.testing.assert_allclose(ds.slices[0].pixels, 0.6 / math.pi, rtol=1e-6)


def test_lambertian_cosine_falloff_60_degrees():
    maps = lambertian_maps(4, 4, albedo=(0.6, 0.6, 0.6))
    pair = DirectionPair(Direction(0, 0), Direction(60, 0))
    ds = render_synthetic_btf(maps, [pair])
    np.testing.assert_allclose(ds.slices[0].pixels, 0.09549, atol=1e-5)


def test_lambertian_closed_form_all_default_pairs():
    maps = lambertian_maps(3, 3, albedo=(0.25, 0.5, 0.75))
    cams = [Direction(0, 0), Direction(45, 90)]
    pairs = pair_product(cams, hemisphere_grid())
    ds = render_synthetic_btf(maps, pairs)
    for pair, s in zip(ds.pairs, ds.slices):
        cos_i = math.cos(math.radians(pair.light.theta))
        expected = np.array([0.25, 0.5, 0.75]) / math.pi * cos_i
        np.testing.assert_allclose(s.pixels, np.broadcast_to(expected, (3, 3, 3)),
                                   rtol=1e-5, atol=1e-7)


def test_ggx_frontal_value_against_oracle():
    h = w = 2
    maps = SvbrdfMaps(
        albedo=np.full((h, w, 3), 0.5, np.float32),
        normal=np.broadcast_to(np.array([0, 0, 1], np.float32), (h, w, 3)).copy(),
        roughness=np.full((h, w), 0.3, np.float32),
        specular=np.ones((h, w), np.float32),
    )
    ds = render_synthetic_btf(maps, [DirectionPair(Direction(0, 0), Direction(0, 0))])
    want = oracle_radiance((0.5, 0.5, 0.5), (0, 0, 1), 0.3, 1.0, 0, 0, 0, 0)
    np.testing.assert_allclose(ds.slices[0].pixels[0, 0], want, rtol=1e-5)


def test_generator_matches_oracle_texelwise():
    maps = textured_maps(4, 5, seed=3)
    pairs = [
        DirectionPair(Direction(0, 0), Direction(0, 0)),
        DirectionPair(Direction(30, 45), Direction(60, 200)),
        DirectionPair(Direction(75, 10), Direction(75, 350)),
        DirectionPair(Direction(15, 300), Direction(45, 120)),
    ]
    ds = render_synthetic_btf(maps, pairs)
    for pair, s in zip(ds.pairs, ds.slices):
        for y in range(4):
            for x in range(5):
                want = oracle_radiance(
                    tuple(maps.albedo[y, x]), tuple(maps.normal[y, x]),
                    float(maps.roughness[y, x]), float(maps.specular[y, x]),
                    pair.camera.theta, pair.camera.phi,
                    pair.light.theta, pair.light.phi)
                np.testing.assert_allclose(s.pixels[y, x], want, rtol=2e-4, atol=1e-6)


def test_brdf_reciprocity_with_flat_normals():
    # swapping camera and light changes radiance only by the cosine ratio,
    # i.e. the BRDF itself is symmetric
    maps = textured_maps(4, 4, seed=1)
    flat = np.zeros((4, 4, 3), np.float32)
    flat[:, :, 2] = 1.0
    maps = SvbrdfMaps(albedo=maps.albedo, normal=flat,
                      roughness=maps.roughness, specular=maps.specular)
    a, b = Direction(20, 30), Direction(65, 250)
    fwd = render_synthetic_btf(maps, [DirectionPair(a, b)]).slices[0].pixels
    rev = render_synthetic_btf(maps, [DirectionPair(b, a)]).slices[0].pixels
    cos_a = math.cos(math.radians(a.theta))
    cos_b = math.cos(math.radians(b.theta))
    np.testing.assert_allclose(fwd / cos_b, rev / cos_a, rtol=1e-5)


def test_below_horizon_is_black():
    maps = textured_maps(6, 6, seed=2)  # bumpy normals tip some texels over
    ds = render_synthetic_btf(maps, [DirectionPair(Direction(75, 0), Direction(75, 180))])
    assert np.all(ds.slices[0].pixels >= 0.0)


def test_zero_length_normal_rejected():
    maps = lambertian_maps(2, 2)
    bad = maps.normal.copy()
    bad[0, 0] = 0.0
    with pytest.raises(ValidationError):
        SvbrdfMaps(albedo=maps.albedo, normal=bad,
                   roughness=maps.roughness, specular=maps.specular)


def test_roughness_range_rejected():
    maps = lambertian_maps(2, 2)
    with pytest.raises(ValidationError):
        SvbrdfMaps(albedo=maps.albedo, normal=maps.normal,
                   roughness=np.zeros((2, 2), np.float32), specular=maps.specular)


def test_textured_maps_tile():
    maps = textured_maps(16, 16, seed=0)
    big = textured_maps(16, 16, seed=0)
    for field in ("albedo", "roughness", "specular", "normal"):
        a = getattr(maps, field)
        b = getattr(big, field)
        np.testing.assert_array_equal(a, b)  # deterministic per seed
    # periodicity: value grid continues smoothly across the wrap
    alb = maps.albedo
    edge_jump = np.abs(alb[0] - alb[-1]).max()
    interior_jump = np.abs(np.diff(alb, axis=0)).max()
    assert edge_jump <= interior_jump * 1.5 + 1e-6


def test_dataset_lookup_by_pair():
    maps = lambertian_maps(4, 4)
    pairs = pair_product([Direction(0, 0)], hemisphere_grid())
    ds = render_synthetic_btf(maps, pairs)
    s = get_slice(ds, DirectionPair(Direction(0, 0), Direction(60, 0)))
    np.testing.assert_allclose(s.pixels, 0.09549, atol=1e-5)
