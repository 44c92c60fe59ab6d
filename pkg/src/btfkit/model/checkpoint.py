"""Checkpoint container for the model pair.

Little-endian layout:
  magic "NBCK" | version u16
  config length u32 | UTF-8 JSON config (architecture, step, rng state)
  tensor count u32
  per tensor: name length u16 | UTF-8 name | rank u8 | extents u32[] | f32 payload

The JSON is serialized with sorted keys and fixed separators, and tensors are
written in deterministic parameter order, so identical state gives identical
bytes.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import FormatError
from .autoencoder import Autoencoder, AutoencoderConfig
from .renderer import RendererMlp

MAGIC = b"NBCK"
VERSION = 1


def _named_tensors(autoencoder: Autoencoder, renderer: RendererMlp):
    out = {}
    for name, t in autoencoder.named_parameters().items():
        out[f"autoencoder.{name}"] = t
    for name, t in renderer.named_parameters().items():
        out[f"renderer.{name}"] = t
    return out


def _config_dict(autoencoder: Autoencoder, renderer: RendererMlp, step: int,
                 rng_state) -> dict:
    cfg = autoencoder.config
    return {
        "widths": list(cfg.widths),
        "depth": cfg.depth,
        "kernel": cfg.kernel,
        "expand": cfg.expand,
        "residual_scale": cfg.residual_scale,
        "attention_reduce": cfg.attention_reduce,
        "hidden": renderer.hidden,
        "n_hidden": renderer.n_hidden,
        "omega0": renderer.omega0,
        "step": int(step),
        "rng_state": rng_state,
    }


def pack_tensors(config: dict, tensors: dict) -> bytes:
    """NBCK byte string from a config dict and named float32 arrays."""
    cfg_blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    parts = [MAGIC, struct.pack("<H", VERSION),
             struct.pack("<I", len(cfg_blob)), cfg_blob,
             struct.pack("<I", len(tensors))]
    for name, data in tensors.items():
        arr = np.ascontiguousarray(data, dtype="<f4")
        nb = name.encode()
        parts.append(struct.pack("<H", len(nb)))
        parts.append(nb)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    return b"".join(parts)


def unpack_tensors(blob: bytes) -> tuple[dict, dict]:
    """Inverse of pack_tensors; raises FormatError with the failing offset."""
    if len(blob) < 6:
        raise FormatError("file truncated inside header", offset=len(blob))
    if blob[:4] != MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {MAGIC!r}", offset=0)
    (version,) = struct.unpack_from("<H", blob, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    at = 6

    def need(n, what):
        nonlocal at
        if at + n > len(blob):
            raise FormatError(f"file truncated inside {what}", offset=len(blob))
        chunk = blob[at:at + n]
        at += n
        return chunk

    (cfg_len,) = struct.unpack("<I", need(4, "config length"))
    try:
        config = json.loads(need(cfg_len, "config").decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"config is not valid JSON: {e}", offset=10) from e
    (count,) = struct.unpack("<I", need(4, "tensor count"))
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", need(2, "tensor name length"))
        name = need(name_len, "tensor name").decode()
        (rank,) = struct.unpack("<B", need(1, "tensor rank"))
        shape = struct.unpack(f"<{rank}I", need(4 * rank, "tensor extents"))
        n_items = int(np.prod(shape)) if rank else 1
        payload_at = at
        data = np.frombuffer(need(4 * n_items, f"tensor {name!r} payload"), dtype="<f4")
        tensors[name] = data.reshape(shape).copy()
        del payload_at
    if at != len(blob):
        raise FormatError(f"{len(blob) - at} trailing bytes after last tensor", offset=at)
    return config, tensors


def save_checkpoint(path, autoencoder: Autoencoder, renderer: RendererMlp,
                    step: int = 0, rng_state=None) -> None:
    config = _config_dict(autoencoder, renderer, step, rng_state)
    tensors = {name: t.data for name, t in _named_tensors(autoencoder, renderer).items()}
    with open(path, "wb") as f:
        f.write(pack_tensors(config, tensors))


def load_checkpoint(path) -> tuple[Autoencoder, RendererMlp, dict]:
    with open(path, "rb") as f:
        blob = f.read()
    config, tensors = unpack_tensors(blob)
    try:
        cfg = AutoencoderConfig(
            widths=tuple(config["widths"]), depth=config["depth"],
            kernel=config["kernel"], expand=config["expand"],
            residual_scale=config["residual_scale"],
            attention_reduce=config["attention_reduce"])
        rng = np.random.default_rng(0)
        autoencoder = Autoencoder(rng, cfg)
        renderer = RendererMlp(rng, depth=config["depth"], hidden=config["hidden"],
                               n_hidden=config["n_hidden"], omega0=config["omega0"])
    except KeyError as e:
        raise FormatError(f"config missing field {e}") from e
    params = _named_tensors(autoencoder, renderer)
    if set(params) != set(tensors):
        missing = sorted(set(params) - set(tensors))
        extra = sorted(set(tensors) - set(params))
        raise FormatError(f"tensor names do not match config: missing {missing}, "
                          f"unexpected {extra}")
    for name, t in params.items():
        if tensors[name].shape != t.data.shape:
            raise FormatError(f"tensor {name!r} has shape {tensors[name].shape}, "
                              f"config implies {t.data.shape}")
        t.data = tensors[name].astype(np.float32)
    meta = {"step": config["step"], "rng_state": config["rng_state"], "config": config}
    return autoencoder, renderer, meta
