"""Test-time conditioning: guidance -> deployable neural BTF bundles."""

from .bundle import (
    NeuralBtf,
    area_downsample,
    make_multires,
    make_tileable,
    propagate,
    query,
    seam_metric,
)
from .nbtx import export_neural_btf, import_neural_btf

__all__ = [
    "NeuralBtf", "area_downsample", "make_multires", "make_tileable",
    "propagate", "query", "seam_metric",
    "export_neural_btf", "import_neural_btf",
]
