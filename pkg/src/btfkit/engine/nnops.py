"""Structured tensor ops: convolution, normalization, resampling, DFT.

All spatial ops take NCHW layouts. Convolutions implement "same" output
sizing (ceil(H/stride)) with either circular (wrap) or zero padding of
floor(k/2). Patch gathering uses modular index arithmetic, so circular
convolutions are exactly equivariant to cyclic shifts.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from .core import Tensor, _any_grad, _record


def _check_4d(x: Tensor, name: str):
    if x.ndim != 4:
        raise DimensionError(f"{name} must be NCHW (4 axes), got shape {x.shape}")


def _gather_patches(x: np.ndarray, kh: int, kw: int, stride: int, padding: str):
    """Return (patches, rows, cols): patches[n,c,i,j,u,v] = x[n,c,(i*s-p+u)%H,(j*s-p+v)%W].

    Zero padding substitutes 0 outside the image instead of wrapping.
    """
    n, c, h, w = x.shape
    ph, pw = kh // 2, kw // 2
    out_h = -(-h // stride)
    out_w = -(-w // stride)
    rows = np.arange(out_h)[:, None] * stride - ph + np.arange(kh)[None, :]
    cols = np.arange(out_w)[:, None] * stride - pw + np.arange(kw)[None, :]
    if padding == "circular":
        patches = x[:, :, (rows % h)[:, None, :, None], (cols % w)[None, :, None, :]]
    else:
        valid = ((rows >= 0) & (rows < h))[:, None, :, None] & ((cols >= 0) & (cols < w))[None, :, None, :]
        patches = x[:, :, (rows.clip(0, h - 1))[:, None, :, None], (cols.clip(0, w - 1))[None, :, None, :]]
        patches = patches * valid
    return patches, rows, cols


def _scatter_patches(gp: np.ndarray, h: int, w: int, kh: int, kw: int,
                     stride: int, padding: str, rows, cols) -> np.ndarray:
    """Adjoint of _gather_patches: overlap-add patch gradients back onto the image."""
    n, c, out_h, out_w = gp.shape[:4]
    ph, pw = kh // 2, kw // 2
    if padding == "circular" and (ph > h or pw > w):
        # Kernel wraps more than once around a tiny image; use a direct
        # modular scatter (slow path, only ever hit on very small maps).
        gx = np.zeros((n, c, h, w), dtype=gp.dtype)
        np.add.at(gx, (slice(None), slice(None),
                       (rows % h)[:, None, :, None], (cols % w)[None, :, None, :]), gp)
        return gx
    buf = np.zeros((n, c, h + 2 * ph, w + 2 * pw), dtype=gp.dtype)
    for u in range(kh):
        for v in range(kw):
            buf[:, :, u:u + stride * out_h:stride, v:v + stride * out_w:stride] += gp[:, :, :, :, u, v]
    gx = buf[:, :, ph:ph + h, pw:pw + w]
    if padding == "circular":
        if ph:
            gx[:, :, h - ph:, :] += buf[:, :, :ph, pw:pw + w]
            gx[:, :, :ph, :] += buf[:, :, ph + h:, pw:pw + w]
        if pw:
            gx[:, :, :, w - pw:] += buf[:, :, ph:ph + h, :pw]
            gx[:, :, :, :pw] += buf[:, :, ph:ph + h, pw + w:]
        if ph and pw:
            gx[:, :, h - ph:, w - pw:] += buf[:, :, :ph, :pw]
            gx[:, :, h - ph:, :pw] += buf[:, :, :ph, pw + w:]
            gx[:, :, :ph, w - pw:] += buf[:, :, ph + h:, :pw]
            gx[:, :, :ph, :pw] += buf[:, :, ph + h:, pw + w:]
    return np.ascontiguousarray(gx)


def conv2d(x: Tensor, weight: Tensor, bias: Tensor | None = None, stride: int = 1,
           padding: str = "circular", groups: int = 1) -> Tensor:
    """2D convolution (cross-correlation) with "same" sizing.

    x: (N, C, H, W); weight: (O, C/groups, kh, kw) with odd kh, kw;
    output: (N, O, ceil(H/stride), ceil(W/stride)).
    """
    _check_4d(x, "conv2d input")
    if weight.ndim != 4:
        raise DimensionError(f"conv2d weight must be (O, C/groups, kh, kw), got {weight.shape}")
    n, c, h, w = x.shape
    o, cg, kh, kw = weight.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise DimensionError(f"conv2d kernel extents must be odd, got {kh}x{kw}")
    if c % groups or o % groups:
        raise DimensionError(f"channels ({c}) and filters ({o}) must divide groups ({groups})")
    if cg != c // groups:
        raise DimensionError(f"weight expects {cg} input channels per group, input has {c // groups}")
    if padding not in ("circular", "zero"):
        raise DimensionError(f"unknown padding mode {padding!r}")

    og = o // groups
    ph, pw = kh // 2, kw // 2
    if groups == c and og == 1 and stride == 1 and padding == "circular":
        # Depthwise stride-1 wrap: accumulate one rolled copy per kernel tap.
        # No patch tensor, and rolls commute with rolls, so the output is
        # exactly equivariant to cyclic shifts of the input.
        wd = weight.data[:, 0]
        y = np.zeros_like(x.data)
        for u in range(kh):
            for v in range(kw):
                y += wd[:, u, v][None, :, None, None] * np.roll(x.data, (ph - u, pw - v), (2, 3))
        if bias is not None:
            y += bias.data.reshape(1, o, 1, 1)
        inputs = (x, weight) if bias is None else (x, weight, bias)
        out = Tensor(y, requires_grad=_any_grad(*inputs))

        def vjp_depthwise(g):
            g = np.ascontiguousarray(g)
            gb = g.sum(axis=(0, 2, 3)) if (bias is not None and bias.requires_grad) else None
            gw = None
            if weight.requires_grad:
                gw = np.empty((c, kh, kw), dtype=g.dtype)
                for u in range(kh):
                    for v in range(kw):
                        gw[:, u, v] = np.sum(
                            g * np.roll(x.data, (ph - u, pw - v), (2, 3)), axis=(0, 2, 3))
                gw = gw.reshape(o, 1, kh, kw)
            gx = None
            if x.requires_grad:
                gx = np.zeros_like(g)
                for u in range(kh):
                    for v in range(kw):
                        gx += wd[:, u, v][None, :, None, None] * np.roll(g, (u - ph, v - pw), (2, 3))
            if bias is None:
                return gx, gw
            return gx, gw, gb

        return _record(out, inputs, vjp_depthwise)

    patches, rows, cols = _gather_patches(x.data, kh, kw, stride, padding)
    out_h, out_w = patches.shape[2], patches.shape[3]

    if groups == 1:
        # (N*oh*ow, C*kh*kw) @ (C*kh*kw, O): hits BLAS sgemm.
        pmat = patches.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, c * kh * kw)
        wmat = weight.data.reshape(o, cg * kh * kw).T
        y = (pmat @ wmat).reshape(n, out_h, out_w, o).transpose(0, 3, 1, 2)
    elif groups == c and og == 1:
        # Depthwise: one small einsum instead of many tiny matmuls.
        y = np.einsum("nchwuv,cuv->nchw", patches, weight.data[:, 0], optimize=True)
    else:
        pg = patches.reshape(n, groups, cg, out_h, out_w, kh, kw)
        y = np.einsum("ngchwuv,gocuv->ngohw", pg,
                      weight.data.reshape(groups, og, cg, kh, kw), optimize=True)
        y = y.reshape(n, o, out_h, out_w)
    y = np.ascontiguousarray(y)
    if bias is not None:
        y += bias.data.reshape(1, o, 1, 1)

    inputs = (x, weight) if bias is None else (x, weight, bias)
    out = Tensor(y, requires_grad=_any_grad(*inputs))

    def vjp(g):
        g = np.ascontiguousarray(g)
        gb = g.sum(axis=(0, 2, 3)) if (bias is not None and bias.requires_grad) else None
        need_w = weight.requires_grad
        need_x = x.requires_grad
        gw = gx = None
        if need_w or need_x:
            # Batched GEMM layout: (groups, N*oh*ow, .) keeps both grads on
            # the BLAS path; einsum would run these contractions as loops.
            gmat = (g.reshape(n, groups, og, out_h, out_w)
                    .transpose(1, 0, 3, 4, 2)
                    .reshape(groups, n * out_h * out_w, og))
        if need_w:
            pmat = (patches.reshape(n, groups, cg, out_h, out_w, kh, kw)
                    .transpose(1, 0, 3, 4, 2, 5, 6)
                    .reshape(groups, n * out_h * out_w, cg * kh * kw))
            gw = (gmat.transpose(0, 2, 1) @ pmat).reshape(o, cg, kh, kw)
        if need_x:
            wmat = weight.data.reshape(groups, og, cg * kh * kw)
            gp = ((gmat @ wmat)
                  .reshape(groups, n, out_h, out_w, cg, kh, kw)
                  .transpose(1, 0, 4, 2, 3, 5, 6)
                  .reshape(n, c, out_h, out_w, kh, kw))
            gx = _scatter_patches(gp, h, w, kh, kw, stride, padding, rows, cols)
        if bias is None:
            return gx, gw
        return gx, gw, gb

    return _record(out, inputs, vjp)


def pad_circular(x: Tensor, amount: int) -> Tensor:
    """Wrap-pad both spatial borders of an NCHW tensor by `amount` texels."""
    _check_4d(x, "pad_circular input")
    n, c, h, w = x.shape
    if amount >= h or amount >= w:
        raise DimensionError(f"pad amount {amount} must be smaller than spatial extent {h}x{w}")
    if amount == 0:
        out = Tensor(x.data.copy(), requires_grad=x.requires_grad)
        return _record(out, (x,), lambda g: (g,))
    idx_h = np.arange(-amount, h + amount) % h
    idx_w = np.arange(-amount, w + amount) % w
    out = Tensor(x.data[:, :, idx_h[:, None], idx_w[None, :]], requires_grad=x.requires_grad)

    def vjp(g):
        a = amount
        gx = g[:, :, a:a + h, a:a + w].copy()
        gx[:, :, h - a:, :] += g[:, :, :a, a:a + w]
        gx[:, :, :a, :] += g[:, :, a + h:, a:a + w]
        gx[:, :, :, w - a:] += g[:, :, a:a + h, :a]
        gx[:, :, :, :a] += g[:, :, a:a + h, a + w:]
        gx[:, :, h - a:, w - a:] += g[:, :, :a, :a]
        gx[:, :, h - a:, :a] += g[:, :, :a, a + w:]
        gx[:, :, :a, w - a:] += g[:, :, a + h:, :a]
        gx[:, :, :a, :a] += g[:, :, a + h:, a + w:]
        return (gx,)

    return _record(out, (x,), vjp)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, axis: int = 1,
               eps: float = 1e-5) -> Tensor:
    """Normalize to zero mean / unit variance along `axis`, then affine.

    gamma/beta have the extent of the normalized axis.
    """
    ax = axis % x.ndim
    c = x.shape[ax]
    if gamma.shape != (c,) or beta.shape != (c,):
        raise DimensionError(f"layer_norm affine shapes {gamma.shape}/{beta.shape} do not match axis extent {c}")
    bshape = [1] * x.ndim
    bshape[ax] = c
    mu = x.data.mean(axis=ax, keepdims=True)
    xc = x.data - mu
    var = np.mean(xc * xc, axis=ax, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    gmat = gamma.data.reshape(bshape)
    out = Tensor(xhat * gmat + beta.data.reshape(bshape), requires_grad=_any_grad(x, gamma, beta))

    def vjp(g):
        sum_axes = tuple(i for i in range(x.ndim) if i != ax)
        g_gamma = (g * xhat).sum(axis=sum_axes) if gamma.requires_grad else None
        g_beta = g.sum(axis=sum_axes) if beta.requires_grad else None
        gx = None
        if x.requires_grad:
            gy = g * gmat
            m1 = gy.mean(axis=ax, keepdims=True)
            m2 = (gy * xhat).mean(axis=ax, keepdims=True)
            gx = inv * (gy - m1 - xhat * m2)
        return gx, g_gamma, g_beta

    return _record(out, (x, gamma, beta), vjp)


def upsample_nearest(x: Tensor, factor: int) -> Tensor:
    """Replicate each texel `factor` times along both spatial axes."""
    _check_4d(x, "upsample input")
    if factor < 1 or int(factor) != factor:
        raise DimensionError(f"upsample factor must be a positive integer, got {factor}")
    f = int(factor)
    if f == 1:
        out = Tensor(x.data.copy(), requires_grad=x.requires_grad)
        return _record(out, (x,), lambda g: (g,))
    y = np.repeat(np.repeat(x.data, f, axis=2), f, axis=3)
    out = Tensor(y, requires_grad=x.requires_grad)
    n, c, h, w = x.shape

    def vjp(g):
        return (g.reshape(n, c, h, f, w, f).sum(axis=(3, 5)),)

    return _record(out, (x,), vjp)


# ---------------------------------------------------------------------------
# Fourier ops


def fft2(x: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2D DFT of the last two axes (numpy convention)."""
    return np.fft.fft2(np.asarray(x), axes=(-2, -1))


def ifft2(x: np.ndarray) -> np.ndarray:
    """Unnormalized inverse 2D DFT: ifft2(fft2(a)) == a * (H*W)."""
    arr = np.asarray(x)
    h, w = arr.shape[-2], arr.shape[-1]
    return np.fft.ifft2(arr, axes=(-2, -1)) * (h * w)


def dft2(x: Tensor) -> Tensor:
    """Differentiable unnormalized 2D DFT over the last two axes.

    Returns a real tensor with a trailing axis of size 2 holding
    (real, imaginary) parts: shape (..., H, W, 2).
    """
    if x.ndim < 2:
        raise DimensionError(f"dft2 needs at least 2 axes, got shape {x.shape}")
    h, w = x.shape[-2], x.shape[-1]
    spec = np.fft.fft2(x.data, axes=(-2, -1))
    stacked = np.stack([spec.real, spec.imag], axis=-1).astype(x.data.dtype)
    out = Tensor(stacked, requires_grad=x.requires_grad)

    def vjp(g):
        gc = g[..., 0] + 1j * g[..., 1]
        gx = np.fft.ifft2(gc, axes=(-2, -1)).real * (h * w)
        return (gx.astype(x.data.dtype),)

    return _record(out, (x,), vjp)
