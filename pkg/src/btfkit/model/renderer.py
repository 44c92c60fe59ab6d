"""The deployable decoder: a pointwise sinusoidal network over latent texels.

Input per texel is the D-channel latent concatenated with the projected-disk
coordinates of the camera and light directions (D + 4 channels). Hidden
layers are 1x1 convolutions, each followed by an affine layer norm and a
sine activation, with identity residuals between the equal-width hidden
layers. With the defaults (D=14, three hidden layers of width 32) the
trainable parameter count is exactly 3011:

    (18*32+32) + 2*(32*32+32) + (32*3+3) + 3*(32+32) = 3011

The layer-norm gain is initialized to 1/omega0 so the sine arguments start
near one radian in scale; a unit-variance input to sin(omega0 * x) would
start the network deep in the oscillatory regime and stall training.
"""

from __future__ import annotations

import numpy as np

from .. import engine as ng
from ..errors import DimensionError
from ..store.dataset import BtfSlice
from ..store.geometry import Direction, DirectionPair, direction_to_projected
from .texture import NeuralTexture


class RendererMlp(ng.Layer):
    def __init__(self, rng: np.random.Generator, depth: int = 14, hidden: int = 32,
                 n_hidden: int = 3, omega0: float = 30.0):
        self.depth = depth
        self.hidden = hidden
        self.n_hidden = n_hidden
        self.omega0 = omega0
        in_ch = depth + 4
        self.convs = []
        self.norms = []
        for i in range(n_hidden):
            self.convs.append(ng.Conv2d(in_ch if i == 0 else hidden, hidden, 1, rng,
                                        init=("siren", i), omega0=omega0))
            self.norms.append(ng.LayerNorm(hidden, gamma_init=1.0 / omega0))
        out_in = hidden if n_hidden else in_ch
        self.out = ng.Conv2d(out_in, 3, 1, rng, init=("siren", max(n_hidden, 1)),
                             omega0=omega0)

    def forward(self, x: ng.Tensor) -> ng.Tensor:
        """Raw network output on (N, D+4, H, W); used directly by training."""
        expected = self.depth + 4
        if x.shape[1] != expected:
            raise DimensionError(f"renderer expects {expected} channels, got {x.shape[1]}")
        h = x
        for i, (conv, norm) in enumerate(zip(self.convs, self.norms)):
            pre = h
            h = ng.sine(norm(conv(h)), self.omega0)
            if i > 0:  # equal-width layers only; the first changes width
                h = h + pre
        return self.out(h)

    def decode(self, texture: ng.Tensor, pair: DirectionPair) -> ng.Tensor:
        """Forward pass with the pair's direction channels appended.

        texture: (N, D, H, W) tensor; keeps the gradient graph intact.
        """
        n, _, h, w = texture.shape
        dirs = direction_channels(pair, n, h, w, texture.dtype)
        return self.forward(ng.concat([texture, ng.Tensor(dirs)], axis=1))

    def __call__(self, x: ng.Tensor) -> ng.Tensor:
        return self.forward(x)


def direction_channels(pair: DirectionPair, n: int, h: int, w: int,
                       dtype=np.float32) -> np.ndarray:
    ox, oy = direction_to_projected(pair.camera)
    ix, iy = direction_to_projected(pair.light)
    vals = np.array([ox, oy, ix, iy], dtype=dtype)
    return np.broadcast_to(vals[None, :, None, None], (n, 4, h, w)).copy()


def render_point(model: RendererMlp, latent, cam: Direction, light: Direction):
    """(latent texel, camera, light) -> linear RGB, clamped at 0 from below.

    latent may be one D-vector or an (N, D) batch; a batch renders as a
    single 1xN fully-convolutional pass.
    """
    lat = np.asarray(latent, dtype=np.float32)
    single = lat.ndim == 1
    if single:
        lat = lat[None, :]
    if lat.shape[1] != model.depth:
        raise DimensionError(f"latent depth {lat.shape[1]} != model depth {model.depth}")
    n = lat.shape[0]
    x = lat.T[None, :, None, :]  # (1, D, 1, N): batch as spatial width
    dirs = direction_channels(DirectionPair(cam, light), 1, 1, n)
    out = model.forward(ng.Tensor(np.concatenate([x, dirs], axis=1)))
    rgb = np.maximum(out.data[0, :, 0, :].T, 0.0)
    return rgb[0] if single else rgb


def render_slice(model: RendererMlp, texture: NeuralTexture,
                 pair: DirectionPair) -> BtfSlice:
    """Decode a whole latent texture under one direction pair."""
    x = ng.Tensor(texture.values.transpose(2, 0, 1)[None])
    out = model.decode(x, pair)
    return BtfSlice(np.maximum(out.data[0].transpose(1, 2, 0), 0.0))


def count_parameters(net: ng.Layer) -> int:
    return sum(t.size for t in net.named_parameters().values())
