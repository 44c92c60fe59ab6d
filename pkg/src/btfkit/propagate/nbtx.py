"""NBTX bundle files: one self-sufficient artifact per material.

Little-endian layout: magic "NBTX", version u16, H u32, W u32, D u16,
texel_size_mm f32, flags u16 (bit 0: float16 texture), texture payload in
[row][col][channel] order, then the decoder weights as an embedded NBCK blob.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import FormatError, ValidationError
from ..model.checkpoint import pack_tensors, unpack_tensors
from ..model.renderer import RendererMlp
from ..model.texture import NeuralTexture
from .bundle import NeuralBtf

MAGIC = b"NBTX"
VERSION = 1
FLAG_FLOAT16 = 1
_HEADER = struct.Struct("<4sHIIHfH")
F16_MAX = 65504.0


def export_neural_btf(nb: NeuralBtf, path, float16: bool = True) -> None:
    """Write a bundle; float16 halves the texture at ~1e-3 latent precision."""
    tex = nb.texture.values
    if float16 and np.abs(tex).max() > F16_MAX:
        raise ValidationError(
            f"latent magnitude {np.abs(tex).max():g} overflows float16; "
            f"export with float16=False")
    flags = FLAG_FLOAT16 if float16 else 0
    header = _HEADER.pack(MAGIC, VERSION, nb.texture.height, nb.texture.width,
                          nb.texture.depth, nb.texel_size, flags)
    payload = tex.astype("<f2" if float16 else "<f4").tobytes()
    config = {"depth": nb.renderer.depth, "hidden": nb.renderer.hidden,
              "n_hidden": nb.renderer.n_hidden, "omega0": nb.renderer.omega0}
    weights = {name: t.data for name, t in nb.renderer.named_parameters().items()}
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)
        f.write(pack_tensors(config, weights))


def import_neural_btf(path) -> NeuralBtf:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise FormatError("file truncated inside header", offset=len(blob))
    magic, version, h, w, d, texel_size, flags = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    dtype = "<f2" if flags & FLAG_FLOAT16 else "<f4"
    n_bytes = h * w * d * np.dtype(dtype).itemsize
    at = _HEADER.size
    if len(blob) < at + n_bytes:
        raise FormatError("file truncated inside texture payload", offset=len(blob))
    tex = np.frombuffer(blob[at:at + n_bytes], dtype=dtype).reshape(h, w, d)
    texture = NeuralTexture(tex.astype(np.float32))
    config, tensors = unpack_tensors(blob[at + n_bytes:])
    try:
        renderer = RendererMlp(np.random.default_rng(0), depth=config["depth"],
                               hidden=config["hidden"], n_hidden=config["n_hidden"],
                               omega0=config["omega0"])
    except KeyError as e:
        raise FormatError(f"decoder config missing field {e}") from e
    params = renderer.named_parameters()
    if set(params) != set(tensors):
        raise FormatError(f"decoder tensor names do not match config: "
                          f"{sorted(set(params) ^ set(tensors))}")
    for name, t in params.items():
        if tensors[name].shape != t.data.shape:
            raise FormatError(f"decoder tensor {name!r} has shape "
                              f"{tensors[name].shape}, config implies {t.data.shape}")
        t.data = tensors[name].astype(np.float32)
    return NeuralBtf(texture=texture, renderer=renderer, texel_size=texel_size)
