"""Guidance-image I/O: PNG with sRGB decoding, PFM passthrough.

Guidance images are LDR linear RGB in [0,1] with dimensions divisible by the
autoencoder stride, so every loaded image is valid conditioning input as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import FormatError, ValidationError

DEFAULT_STRIDE = 8


@dataclass(frozen=True)
class GuidanceImage:
    """H x W x 3 linear RGB in [0,1]; H and W multiples of the network stride."""

    pixels: np.ndarray
    stride: int = DEFAULT_STRIDE

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float32)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValidationError(f"guidance must be HxWx3, got {px.shape}")
        if not np.all(np.isfinite(px)):
            raise ValidationError("guidance contains non-finite values")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValidationError(
                f"guidance values must lie in [0,1], got [{px.min():g}, {px.max():g}]")
        h, w = px.shape[:2]
        if h % self.stride or w % self.stride:
            raise ValidationError(
                f"guidance is {h}x{w}; crop or pad both sides to a multiple of "
                f"{self.stride}")
        object.__setattr__(self, "pixels", px)


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float32)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4).astype(np.float32)


def linear_to_srgb(c: np.ndarray) -> np.ndarray:
    c = np.clip(np.asarray(c, dtype=np.float32), 0.0, 1.0)
    return np.where(c <= 0.0031308, c * 12.92,
                    1.055 * c ** (1.0 / 2.4) - 0.055).astype(np.float32)


def _decode_png(path) -> np.ndarray:
    arr = np.asarray(Image.open(path))
    if arr.dtype == np.uint8:
        scaled = arr.astype(np.float32) / 255.0
    elif arr.dtype == np.uint16:
        scaled = arr.astype(np.float32) / 65535.0
    elif arr.dtype == np.int32:  # Pillow mode "I" for 16-bit grayscale
        scaled = arr.astype(np.float32) / 65535.0
    else:
        raise FormatError(f"unsupported PNG sample type {arr.dtype}")
    if scaled.ndim == 2:
        scaled = np.repeat(scaled[:, :, None], 3, axis=2)
    if scaled.shape[2] == 4:
        scaled = scaled[:, :, :3]
    return srgb_to_linear(scaled)


def load_guidance(path, stride: int = DEFAULT_STRIDE) -> GuidanceImage:
    """PNG decodes through the sRGB curve; PFM floats pass through unchanged."""
    ext = Path(path).suffix.lower()
    if ext == ".png":
        return GuidanceImage(_decode_png(path), stride=stride)
    if ext == ".pfm":
        return GuidanceImage(read_pfm(path), stride=stride)
    raise FormatError(f"unknown image extension {ext!r} (use .png or .pfm)")


def save_image(image: np.ndarray, path) -> None:
    """Linear RGB out: .png encodes through sRGB at 8 bits, .pfm stores floats."""
    px = np.asarray(image, dtype=np.float32)
    if px.ndim == 2:
        px = np.repeat(px[:, :, None], 3, axis=2)
    ext = Path(path).suffix.lower()
    if ext == ".png":
        encoded = np.round(linear_to_srgb(px) * 255.0).astype(np.uint8)
        Image.fromarray(encoded, mode="RGB").save(path)
    elif ext == ".pfm":
        write_pfm(px, path)
    else:
        raise FormatError(f"unknown image extension {ext!r} (use .png or .pfm)")


def read_pfm(path) -> np.ndarray:
    """Color PFM: 'PF', dims, scale (sign = endianness), rows bottom-up."""
    with open(path, "rb") as f:
        blob = f.read()
    try:
        header, dims, scale_line, rest = blob.split(b"\n", 3)
        w, h = (int(v) for v in dims.split())
        scale = float(scale_line)
    except (ValueError, IndexError) as e:
        raise FormatError(f"malformed PFM header: {e}", offset=0) from e
    if header not in (b"PF", b"Pf"):
        raise FormatError(f"bad PFM magic {header!r}", offset=0)
    channels = 3 if header == b"PF" else 1
    dtype = "<f4" if scale < 0 else ">f4"
    count = w * h * channels
    if len(rest) < count * 4:
        raise FormatError(f"PFM payload truncated ({len(rest)} bytes)",
                          offset=len(blob) - len(rest))
    data = np.frombuffer(rest, dtype=dtype, count=count)
    img = data.reshape(h, w, channels)[::-1].astype(np.float32)  # bottom-up rows
    return np.repeat(img, 3, axis=2) if channels == 1 else img


def write_pfm(image: np.ndarray, path) -> None:
    px = np.asarray(image, dtype=np.float32)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValidationError(f"PFM writer expects HxWx3, got {px.shape}")
    h, w = px.shape[:2]
    with open(path, "wb") as f:
        f.write(b"PF\n%d %d\n-1.0\n" % (w, h))
        f.write(px[::-1].astype("<f4").tobytes())
