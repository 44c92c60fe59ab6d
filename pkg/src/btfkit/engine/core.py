"""Dense float tensors with reverse-mode automatic differentiation.

Values live in numpy arrays (float32 by default, float64 available for
high-precision gradient checks). Differentiable operations record nodes
onto the currently active :class:`Tape`; ``backward`` replays the tape in
reverse and accumulates gradients additively into ``Tensor.grad``.

Without an active tape every operation is a plain forward computation,
which is what inference paths use.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

from ..errors import DimensionError, DomainError, GraphError

DEFAULT_DTYPE = np.float32
_SUPPORTED_DTYPES = (np.float32, np.float64)

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Tensor:
    """N-dimensional float array, optionally tracked for gradients."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        if dtype is None:
            # numpy arrays and scalars keep their float precision (float64 is
            # the gradcheck mode and must survive op chains, including
            # full reductions that yield numpy scalars); everything else,
            # lists and Python floats included, becomes float32
            if isinstance(data, (np.ndarray, np.generic)) and data.dtype in _SUPPORTED_DTYPES:
                dtype = data.dtype
            else:
                dtype = DEFAULT_DTYPE
        arr = np.asarray(data, dtype=dtype)
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else _raise_scalar(self)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def assert_finite(self, context: str = "tensor"):
        from ..errors import NumericsError

        if not np.all(np.isfinite(self.data)):
            raise NumericsError(f"non-finite values in {context}")
        return self

    def __repr__(self):
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype.name}, requires_grad={self.requires_grad})"

    # Operator sugar; the functional forms below do the work.
    def __add__(self, other):
        return add(self, _as_tensor(other, self.dtype))

    def __radd__(self, other):
        return add(_as_tensor(other, self.dtype), self)

    def __sub__(self, other):
        return sub(self, _as_tensor(other, self.dtype))

    def __rsub__(self, other):
        return sub(_as_tensor(other, self.dtype), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other, self.dtype))

    def __rmul__(self, other):
        return mul(_as_tensor(other, self.dtype), self)

    def __truediv__(self, other):
        return div(self, _as_tensor(other, self.dtype))

    def __neg__(self):
        return neg(self)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def abs(self):
        return absolute(self)


def _raise_scalar(t):
    raise GraphError(f"item() requires a scalar tensor, got shape {t.shape}")


def _as_tensor(x, dtype) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype))


class _Node:
    """One recorded operation: output, inputs, and a vector-Jacobian closure."""

    __slots__ = ("out", "inputs", "vjp")

    def __init__(self, out: Tensor, inputs: tuple[Tensor, ...], vjp):
        self.out = out
        self.inputs = inputs
        self.vjp = vjp


class Tape:
    """Wengert list of operations, recorded in execution (topological) order.

    Use as a context manager around the forward pass, then pass to
    :func:`backward`. Tapes are rebuilt per forward pass (define-by-run).
    """

    def __init__(self):
        self._nodes: list[_Node] = []

    def __len__(self):
        return len(self._nodes)

    def __enter__(self):
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _TAPE_STACK.pop()
        assert popped is self, "tapes must be exited in LIFO order"
        return False


_TAPE_STACK: list[Tape] = []


def _record(out: Tensor, inputs: tuple[Tensor, ...], vjp) -> Tensor:
    if out.requires_grad and _TAPE_STACK:
        _TAPE_STACK[-1]._nodes.append(_Node(out, inputs, vjp))
    return out


def _any_grad(*tensors: Tensor) -> bool:
    return any(t.requires_grad for t in tensors)


def _accumulate(t: Tensor, g: np.ndarray):
    if t.grad is None:
        t.grad = g.astype(t.data.dtype, copy=True)
    else:
        t.grad += g


def backward(loss: Tensor, tape: Tape) -> None:
    """Populate ``grad`` on every requires-grad ancestor of a scalar loss.

    Gradients accumulate additively, both across multiple uses of a tensor
    within the graph and across repeated backward calls; call
    :func:`zero_grads` between optimization steps.
    """
    if loss.data.size != 1:
        raise GraphError(f"backward expects a scalar loss, got shape {loss.shape}")
    # per-call adjoint buffers keep repeated backward() calls independent;
    # only the final commit into Tensor.grad accumulates across calls
    adjoints: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    holders: dict[int, Tensor] = {id(loss): loss}
    for node in reversed(tape._nodes):
        g = adjoints.get(id(node.out))
        if g is None:
            continue
        for t, gi in zip(node.inputs, node.vjp(g)):
            if gi is None or not t.requires_grad:
                continue
            key = id(t)
            if key in adjoints:
                adjoints[key] = adjoints[key] + gi
            else:
                adjoints[key] = gi
                holders[key] = t
    for key, t in holders.items():
        _accumulate(t, np.asarray(adjoints[key]))


def zero_grads(params) -> None:
    for p in params:
        p.grad = None


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# elementwise ops


def add(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data + b.data, requires_grad=_any_grad(a, b))
    return _record(out, (a, b), lambda g: (
        _unbroadcast(g, a.shape) if a.requires_grad else None,
        _unbroadcast(g, b.shape) if b.requires_grad else None,
    ))


def sub(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data - b.data, requires_grad=_any_grad(a, b))
    return _record(out, (a, b), lambda g: (
        _unbroadcast(g, a.shape) if a.requires_grad else None,
        _unbroadcast(-g, b.shape) if b.requires_grad else None,
    ))


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data * b.data, requires_grad=_any_grad(a, b))
    return _record(out, (a, b), lambda g: (
        _unbroadcast(g * b.data, a.shape) if a.requires_grad else None,
        _unbroadcast(g * a.data, b.shape) if b.requires_grad else None,
    ))


def div(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data / b.data, requires_grad=_any_grad(a, b))
    return _record(out, (a, b), lambda g: (
        _unbroadcast(g / b.data, a.shape) if a.requires_grad else None,
        _unbroadcast(-g * a.data / (b.data * b.data), b.shape) if b.requires_grad else None,
    ))


def neg(a: Tensor) -> Tensor:
    out = Tensor(-a.data, requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (-g,))


def exp(a: Tensor) -> Tensor:
    out = Tensor(np.exp(a.data), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g * out.data,))


def log1p(a: Tensor) -> Tensor:
    """log(1 + x); defined for x > -1 only."""
    if np.any(a.data <= -1.0):
        raise DomainError("log1p requires all inputs > -1")
    out = Tensor(np.log1p(a.data), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g / (1.0 + a.data),))


def sigmoid(a: Tensor) -> Tensor:
    out = Tensor(1.0 / (1.0 + np.exp(-a.data)), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g * out.data * (1.0 - out.data),))


def absolute(a: Tensor) -> Tensor:
    out = Tensor(np.abs(a.data), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g * np.sign(a.data),))


def clamp(a: Tensor, lo: float | None = None, hi: float | None = None) -> Tensor:
    lo_v = -np.inf if lo is None else lo
    hi_v = np.inf if hi is None else hi
    out = Tensor(np.clip(a.data, lo_v, hi_v), requires_grad=a.requires_grad)
    mask = (a.data >= lo_v) & (a.data <= hi_v)
    return _record(out, (a,), lambda g: (g * mask,))


def gelu(a: Tensor) -> Tensor:
    """x * Phi(x) with the exact Gaussian CDF (no tanh approximation)."""
    x = a.data
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    out = Tensor(x * cdf, requires_grad=a.requires_grad)

    def vjp(g):
        pdf = np.exp(-0.5 * x * x) * _INV_SQRT2PI
        return (g * (cdf + x * pdf),)

    return _record(out, (a,), vjp)


def sine(a: Tensor, omega0: float = 1.0) -> Tensor:
    """sin(omega0 * x), the sinusoidal network activation."""
    scaled = omega0 * a.data
    out = Tensor(np.sin(scaled), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g * (omega0 * np.cos(scaled)),))


# ---------------------------------------------------------------------------
# reductions


def sum_(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = Tensor(np.sum(a.data, axis=axis, keepdims=keepdims), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (_expand_reduced(g, a.shape, axis, keepdims),))


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = Tensor(np.mean(a.data, axis=axis, keepdims=keepdims), requires_grad=a.requires_grad)
    count = a.data.size / max(out.data.size, 1)
    return _record(out, (a,), lambda g: (_expand_reduced(g, a.shape, axis, keepdims) * (1.0 / count),))


def amax(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    """Max reduction; gradient splits evenly across tied maxima."""
    out = Tensor(np.max(a.data, axis=axis, keepdims=keepdims), requires_grad=a.requires_grad)
    full = np.max(a.data, axis=axis, keepdims=True)

    def vjp(g):
        mask = (a.data == full)
        ties = np.sum(mask, axis=axis, keepdims=True)
        g_full = _expand_reduced(g, a.shape, axis, keepdims)
        return (g_full * mask / ties,)

    return _record(out, (a,), vjp)


def _expand_reduced(g: np.ndarray, shape, axis, keepdims) -> np.ndarray:
    if axis is None:
        return np.broadcast_to(g.reshape((1,) * len(shape)), shape)
    if not keepdims:
        axes = axis if isinstance(axis, tuple) else (axis,)
        axes = tuple(ax % len(shape) for ax in axes)
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


# ---------------------------------------------------------------------------
# shape ops


def reshape(a: Tensor, shape) -> Tensor:
    out = Tensor(a.data.reshape(shape), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor, axis0: int, axis1: int) -> Tensor:
    out = Tensor(np.swapaxes(a.data, axis0, axis1), requires_grad=a.requires_grad)
    return _record(out, (a,), lambda g: (np.swapaxes(g, axis0, axis1),))


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = tuple(tensors)
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis),
                 requires_grad=_any_grad(*tensors))
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        pieces = np.split(g, splits, axis=axis)
        return tuple(p if t.requires_grad else None for p, t in zip(pieces, tensors))

    return _record(out, tensors, vjp)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product; leading batch dimensions must match exactly."""
    if a.shape[:-2] != b.shape[:-2]:
        raise DimensionError(f"matmul batch dims differ: {a.shape} vs {b.shape}")
    out = Tensor(a.data @ b.data, requires_grad=_any_grad(a, b))
    return _record(out, (a, b), lambda g: (
        g @ np.swapaxes(b.data, -1, -2) if a.requires_grad else None,
        np.swapaxes(a.data, -1, -2) @ g if b.requires_grad else None,
    ))
