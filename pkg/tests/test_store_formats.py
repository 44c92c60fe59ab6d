"""BTF container and image round trips, plus corrupted-file rejection."""

import struct

import numpy as np
import pytest
from PIL import Image

from btfkit.errors import FormatError, PairLookupError, ValidationError
from btfkit.store import (
    BtfDataset,
    BtfSlice,
    Direction,
    DirectionPair,
    GuidanceImage,
    get_slice,
    load_btf,
    load_guidance,
    read_pfm,
    save_btf,
    save_image,
    srgb_to_linear,
    write_pfm,
)


def _dataset(h=2, w=3, n=4, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    pairs = tuple(DirectionPair(Direction(float(10 * i), float(20 * i)),
                                Direction(float(5 * i), float(30 * i)))
                  for i in range(n))
    slices = tuple(BtfSlice(rng.uniform(0.01, scale, (h, w, 3)).astype(np.float32))
                   for _ in range(n))
    return BtfDataset(height=h, width=w, texel_size=0.35, pairs=pairs, slices=slices)


def test_roundtrip_float32_bit_exact(tmp_path):
    ds = _dataset()
    p = tmp_path / "d.nbtf"
    save_btf(ds, p, float16=False)
    back = load_btf(p)
    assert back.pairs == ds.pairs
    assert back.texel_size == ds.texel_size
    for a, b in zip(ds.slices, back.slices):
        assert a.pixels.tobytes() == b.pixels.tobytes()


def test_roundtrip_float16_within_tolerance(tmp_path):
    ds = _dataset(scale=40.0)
    p = tmp_path / "d.nbtf"
    save_btf(ds, p)  # float16 is the default
    back = load_btf(p)
    for a, b in zip(ds.slices, back.slices):
        rel = np.abs(a.pixels - b.pixels) / np.maximum(a.pixels, 1e-6)
        assert rel.max() < 2.0 ** -10


def test_save_deterministic_bytes(tmp_path):
    ds = _dataset()
    p1, p2 = tmp_path / "a.nbtf", tmp_path / "b.nbtf"
    save_btf(ds, p1)
    save_btf(ds, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_file_size_matches_format_arithmetic(tmp_path):
    ds = _dataset(h=2, w=2, n=2)
    p = tmp_path / "d.nbtf"
    save_btf(ds, p)  # float16 payload
    header = 4 + 2 + 2 + 4 + 4 + 4 + 4
    angles = 2 * 16
    payload = 2 * (2 * 2 * 3 * 2)
    assert p.stat().st_size == header + angles + payload


def test_minimal_hand_assembled_file(tmp_path):
    # 1x1 texel, 1 pair, float32 payload of 0.5s, assembled byte by byte
    blob = (b"NBTF" + struct.pack("<HH", 1, 0) + struct.pack("<III", 1, 1, 1)
            + struct.pack("<f", 1.0)
            + struct.pack("<4f", 30.0, 0.0, 45.0, 90.0)
            + struct.pack("<3f", 0.5, 0.5, 0.5))
    p = tmp_path / "m.nbtf"
    p.write_bytes(blob)
    ds = load_btf(p)
    assert ds.n_pairs == 1 and ds.height == 1 and ds.width == 1
    assert ds.pairs[0] == DirectionPair(Direction(30, 0), Direction(45, 90))
    np.testing.assert_array_equal(ds.slices[0].pixels, np.full((1, 1, 3), 0.5))


def test_bad_magic_rejected_with_offset(tmp_path):
    ds = _dataset()
    p = tmp_path / "d.nbtf"
    save_btf(ds, p)
    blob = bytearray(p.read_bytes())
    blob[0:4] = b"XBTF"
    p.write_bytes(bytes(blob))
    with pytest.raises(FormatError, match="byte offset 0"):
        load_btf(p)


def test_bad_version_rejected_with_offset(tmp_path):
    p = tmp_path / "d.nbtf"
    save_btf(_dataset(), p)
    blob = bytearray(p.read_bytes())
    blob[4:6] = struct.pack("<H", 9)
    p.write_bytes(bytes(blob))
    with pytest.raises(FormatError, match="byte offset 4"):
        load_btf(p)


def test_truncation_rejected(tmp_path):
    p = tmp_path / "d.nbtf"
    save_btf(_dataset(), p)
    blob = p.read_bytes()
    for cut in (3, 10, len(blob) - 5):
        p.write_bytes(blob[:cut])
        with pytest.raises(FormatError):
            load_btf(p)


def test_nan_payload_rejected(tmp_path):
    p = tmp_path / "d.nbtf"
    save_btf(_dataset(n=1), p, float16=False)
    blob = bytearray(p.read_bytes())
    blob[-12:-8] = struct.pack("<f", float("nan"))
    p.write_bytes(bytes(blob))
    with pytest.raises(ValidationError, match="non-finite"):
        load_btf(p)


def test_negative_payload_rejected(tmp_path):
    p = tmp_path / "d.nbtf"
    save_btf(_dataset(n=1), p, float16=False)
    blob = bytearray(p.read_bytes())
    blob[-4:] = struct.pack("<f", -0.25)
    p.write_bytes(bytes(blob))
    with pytest.raises(ValidationError, match="negative"):
        load_btf(p)


def test_float16_overflow_guard(tmp_path):
    s = BtfSlice(np.full((1, 1, 3), 1e5, np.float32))
    ds = BtfDataset(1, 1, 1.0, (DirectionPair(Direction(0, 0), Direction(0, 0)),), (s,))
    with pytest.raises(ValidationError, match="float16"):
        save_btf(ds, tmp_path / "x.nbtf")
    save_btf(ds, tmp_path / "x.nbtf", float16=False)  # float32 handles it


def test_missing_pair_reports_nearest():
    ds = _dataset(n=3)
    ask = DirectionPair(Direction(11.0, 20.0), Direction(5.0, 30.0))
    with pytest.raises(PairLookupError, match=r"nearest.*θ=10"):
        get_slice(ds, ask)


def test_dataset_invariants():
    s = BtfSlice(np.zeros((2, 2, 3), np.float32))
    pair = DirectionPair(Direction(0, 0), Direction(0, 0))
    with pytest.raises(ValidationError):
        BtfDataset(2, 2, 1.0, (), ())  # zero slices
    with pytest.raises(ValidationError):
        BtfDataset(2, 2, 1.0, (pair, pair), (s, s))  # duplicate pairs
    with pytest.raises(ValidationError):
        BtfSlice(np.full((2, 2, 3), -1.0, np.float32))
    with pytest.raises(ValidationError):
        BtfSlice(np.full((2, 2, 3), np.nan, np.float32))


# -- images -------------------------------------------------------------------


def test_png_srgb_decode_values(tmp_path):
    img = np.zeros((8, 8, 3), np.uint8)
    img[:, :4] = 255
    img[:, 4:] = 128
    p = tmp_path / "g.png"
    Image.fromarray(img).save(p)
    g = load_guidance(p)
    assert g.pixels[0, 0, 0] == pytest.approx(1.0)
    assert g.pixels[0, 7, 0] == pytest.approx(0.2158, abs=2e-4)


def test_png_zero_maps_to_zero(tmp_path):
    p = tmp_path / "g.png"
    Image.fromarray(np.zeros((8, 8, 3), np.uint8)).save(p)
    assert load_guidance(p).pixels.max() == 0.0


def test_srgb_curve_spot_values():
    assert srgb_to_linear(np.float32(128 / 255)) == pytest.approx(0.2158, abs=2e-4)
    assert srgb_to_linear(np.float32(0.04)) == pytest.approx(0.04 / 12.92, rel=1e-5)


def test_png_roundtrip_through_save(tmp_path):
    rng = np.random.default_rng(0)
    linear = rng.uniform(0, 1, (8, 8, 3)).astype(np.float32)
    p = tmp_path / "img.png"
    save_image(linear, p)
    back = load_guidance(p)
    assert np.abs(back.pixels - linear).max() < 0.01  # 8-bit quantization


def test_pfm_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    img = rng.uniform(0, 1, (8, 16, 3)).astype(np.float32)
    p = tmp_path / "img.pfm"
    write_pfm(img, p)
    back = read_pfm(p)
    assert back.tobytes() == img.tobytes()


def test_pfm_guidance_passthrough(tmp_path):
    img = np.full((8, 8, 3), 0.2158, np.float32)
    p = tmp_path / "img.pfm"
    write_pfm(img, p)
    g = load_guidance(p)
    np.testing.assert_array_equal(g.pixels, img)  # no sRGB applied


def test_guidance_stride_validation(tmp_path):
    p = tmp_path / "g.png"
    Image.fromarray(np.zeros((9, 8, 3), np.uint8)).save(p)
    with pytest.raises(ValidationError, match="crop or pad"):
        load_guidance(p)


def test_unknown_extension_rejected(tmp_path):
    p = tmp_path / "g.tiff"
    p.write_bytes(b"x")
    with pytest.raises(FormatError):
        load_guidance(p)


def test_guidance_range_validation():
    with pytest.raises(ValidationError):
        GuidanceImage(np.full((8, 8, 3), 1.5, np.float32))


def test_sixteen_bit_png(tmp_path):
    arr = np.full((8, 8), 65535, np.uint16)
    p = tmp_path / "g16.png"
    Image.fromarray(arr).save(p)
    g = load_guidance(p)
    assert g.pixels.shape == (8, 8, 3)
    assert g.pixels[0, 0, 0] == pytest.approx(1.0)
