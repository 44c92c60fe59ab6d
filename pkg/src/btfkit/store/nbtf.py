"""Binary container for tabulated BTFs.

Little-endian layout:
  magic "NBTF" | version u16 (=1) | flags u16 (bit0: 1 = float16 payload)
  height u32 | width u32 | n_pairs u32 | texel_size_mm f32
  n_pairs x (theta_cam, phi_cam, theta_light, phi_light) f32
  payload [pair][row][col][r,g,b], float16 or float32 per flags

float16 is the on-disk default (BTF radiance tolerates the precision);
float32 gives bit-exact round trips.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import FormatError, ValidationError
from .dataset import BtfDataset, BtfSlice
from .geometry import Direction, DirectionPair

MAGIC = b"NBTF"
VERSION = 1
FLAG_FLOAT16 = 0x0001

_HEADER = struct.Struct("<4sHHIIIf")  # magic, version, flags, H, W, n_pairs, texel_size


def save_btf(dataset: BtfDataset, path, float16: bool = True) -> None:
    if float16:
        peak = max(float(s.pixels.max(initial=0.0)) for s in dataset.slices)
        if peak > 65504.0:
            raise ValidationError(
                f"radiance {peak:g} exceeds float16 range; save with float16=False")
    flags = FLAG_FLOAT16 if float16 else 0
    parts = [_HEADER.pack(MAGIC, VERSION, flags, dataset.height, dataset.width,
                          dataset.n_pairs, dataset.texel_size)]
    angles = np.array([[p.camera.theta, p.camera.phi, p.light.theta, p.light.phi]
                       for p in dataset.pairs], dtype="<f4")
    parts.append(angles.tobytes())
    payload_dtype = "<f2" if float16 else "<f4"
    for s in dataset.slices:
        parts.append(s.pixels.astype(payload_dtype).tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_btf(path) -> BtfDataset:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"file truncated inside header, {len(blob)} bytes",
                          offset=len(blob))
    magic, version, flags, height, width, n_pairs, texel_size = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    if n_pairs < 1:
        raise FormatError("n_pairs must be >= 1", offset=16)

    angles_at = _HEADER.size
    angles_len = n_pairs * 16
    payload_at = angles_at + angles_len
    if len(blob) < payload_at:
        raise FormatError("file truncated inside direction table", offset=len(blob))
    angles = np.frombuffer(blob, dtype="<f4", count=n_pairs * 4,
                           offset=angles_at).reshape(n_pairs, 4)
    try:
        pairs = tuple(DirectionPair(Direction(float(a[0]), float(a[1])),
                                    Direction(float(a[2]), float(a[3])))
                      for a in angles)
    except ValidationError as e:
        raise FormatError(f"invalid direction record: {e}", offset=angles_at) from e

    item = 2 if flags & FLAG_FLOAT16 else 4
    slice_len = height * width * 3 * item
    if len(blob) != payload_at + n_pairs * slice_len:
        raise FormatError(
            f"payload is {len(blob) - payload_at} bytes, expected {n_pairs * slice_len}",
            offset=len(blob))
    dtype = "<f2" if flags & FLAG_FLOAT16 else "<f4"
    slices = []
    for i in range(n_pairs):
        at = payload_at + i * slice_len
        px = np.frombuffer(blob, dtype=dtype, count=height * width * 3, offset=at)
        px = px.astype(np.float32).reshape(height, width, 3)
        if not np.all(np.isfinite(px)):
            raise ValidationError(f"non-finite radiance in slice {i}")
        if np.any(px < 0):
            raise ValidationError(f"negative radiance in slice {i}")
        slices.append(BtfSlice(px))
    return BtfDataset(height=height, width=width, texel_size=texel_size,
                      pairs=pairs, slices=tuple(slices))
