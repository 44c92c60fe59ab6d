"""btfkit: conditioned neural BTFs.

Trains an autoencoder that maps a guidance image to a latent neural texture
and a small sinusoidal renderer that maps (latent texel, camera, light) to
RGB. The pair compresses a BTF, propagates it to new guidance images,
produces tileable and multi-resolution variants, and exports deployable
bundles for render engines.
"""

__version__ = "0.1.0"

from .errors import (
    BtfkitError,
    ConfigError,
    DimensionError,
    DomainError,
    FormatError,
    GraphError,
    NumericsError,
    PairLookupError,
    ValidationError,
)

__all__ = [
    "__version__",
    "BtfkitError", "ConfigError", "DimensionError", "DomainError", "FormatError",
    "GraphError", "NumericsError", "PairLookupError", "ValidationError",
]
