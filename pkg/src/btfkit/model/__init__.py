"""The two networks, the latent texture type, and checkpoint serialization."""

from .autoencoder import Autoencoder, AutoencoderConfig, encode
from .checkpoint import load_checkpoint, pack_tensors, save_checkpoint, unpack_tensors
from .renderer import RendererMlp, count_parameters, direction_channels, render_point, render_slice
from .texture import NeuralTexture

__all__ = [
    "Autoencoder", "AutoencoderConfig", "encode",
    "RendererMlp", "count_parameters", "direction_channels",
    "render_point", "render_slice",
    "NeuralTexture",
    "save_checkpoint", "load_checkpoint", "pack_tensors", "unpack_tensors",
]
