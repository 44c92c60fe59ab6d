"""Minimal dense-tensor engine with reverse-mode autodiff.

Exactly the operator set the two networks need: elementwise math, reductions,
convolution with circular padding, layer norm, nearest upsampling, a
differentiable 2D DFT, orthogonal / sinusoidal initializers, and Adam.
"""

from .core import (
    Tensor,
    Tape,
    backward,
    zero_grads,
    add,
    sub,
    mul,
    div,
    neg,
    exp,
    log1p,
    sigmoid,
    absolute,
    clamp,
    gelu,
    sine,
    sum_,
    mean,
    amax,
    reshape,
    transpose,
    concat,
    matmul,
)
from .nnops import conv2d, pad_circular, layer_norm, upsample_nearest, fft2, ifft2, dft2
from .layers import Layer, Conv2d, LayerNorm
from .init import init_orthogonal, init_siren, siren_bound
from .optim import AdamState, adam_step, cosine_lr

__all__ = [
    "Tensor", "Tape", "backward", "zero_grads",
    "add", "sub", "mul", "div", "neg", "exp", "log1p", "sigmoid", "absolute",
    "clamp", "gelu", "sine", "sum_", "mean", "amax", "reshape", "transpose",
    "concat", "matmul",
    "conv2d", "pad_circular", "layer_norm", "upsample_nearest", "fft2", "ifft2", "dft2",
    "Layer", "Conv2d", "LayerNorm",
    "init_orthogonal", "init_siren", "siren_bound",
    "AdamState", "adam_step", "cosine_lr",
]
