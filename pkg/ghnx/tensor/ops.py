"""Differentiable tensor operations

Elementwise arithmetic broadcasts like numpy. Named axes ("channel",
"height", "width") count from the end, so they address both single images
(C, H, W) and batches (B, C, H, W).
"""
from collections import namedtuple

import numpy as np
from scipy.special import expit, log_softmax

from ..errors import DimensionError, InputError
from .tensor import Tensor, as_tensor, emit, unbroadcast


AXIS_NAMES = {"channel": -3, "height": -2, "width": -1}


def _axis(x, axis):
    """Resolve a named or negative axis to a non-negative index"""
    if isinstance(axis, str):
        if axis not in AXIS_NAMES:
            raise InputError(f"unknown axis name: {axis}")
        axis = AXIS_NAMES[axis]
    ndim = x.ndim
    if not -ndim <= axis < ndim:
        emsg = f"axis {axis} out of range for tensor of shape {x.shape}"
        raise DimensionError(emsg)
    return axis % ndim


def _broadcast_shape(a, b):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        emsg = f"shapes {a.shape} and {b.shape} do not broadcast"
        raise DimensionError(emsg) from None


# Elementwise

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    return emit(
        a.data + b.data, (a, b),
        lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape))
    )


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    return emit(
        a.data - b.data, (a, b),
        lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape))
    )


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    return emit(
        a.data * b.data, (a, b),
        lambda g: (
            unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)
        )
    )


def scale(x, c):
    """Multiply by a constant"""
    c = float(c)
    return emit(x.data * c, (x,), lambda g: (g * c,))


def relu(x):
    mask = x.data > 0
    return emit(np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,))


def sigmoid(x):
    y = expit(x.data)
    return emit(y, (x,), lambda g: (g * y * (1.0 - y),))


def tanh(x):
    y = np.tanh(x.data)
    return emit(y, (x,), lambda g: (g * (1.0 - y * y),))


# Linear algebra

def matmul(a, b):
    """Matrix product of a (m, k) and b (k, n)"""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        emsg = f"cannot multiply matrices of shapes {a.shape} and {b.shape}"
        raise DimensionError(emsg)
    return emit(
        a.data @ b.data, (a, b),
        lambda g: (g @ b.data.T, a.data.T @ g)
    )


def linear(x, w, b=None):
    """Fully-connected layer, x (n, in) -> (n, out)

    Parameters
    ----------
    x: Tensor (n, in)
       inputs, one row per sample
    w: Tensor (out, in)
       weight matrix
    b: Tensor (out,), optional
       bias
    """
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[1]:
        emsg = f"linear layer of shape {w.shape} cannot take input {x.shape}"
        raise DimensionError(emsg)
    out = x.data @ w.data.T
    inputs = (x, w)
    if b is not None:
        if b.shape != (w.shape[0],):
            emsg = f"bias of shape {b.shape} does not match weight {w.shape}"
            raise DimensionError(emsg)
        out = out + b.data
        inputs = (x, w, b)

    def backward(g):
        grads = (g @ w.data, g.T @ x.data)
        if b is not None:
            grads += (g.sum(axis=0),)
        return grads

    return emit(out, inputs, backward)


# Shape manipulation

def reshape(x, shape):
    shape = tuple(shape)
    if int(np.prod(shape)) != x.size or 0 in shape:
        emsg = f"cannot reshape tensor of shape {x.shape} to {shape}"
        raise DimensionError(emsg)
    old = x.shape
    return emit(x.data.reshape(shape), (x,), lambda g: (g.reshape(old),))


def transpose(x, axes):
    """Permute the axes of x"""
    axes = tuple(axes)
    if sorted(axes) != list(range(x.ndim)):
        emsg = f"axes {axes} do not permute a tensor of shape {x.shape}"
        raise DimensionError(emsg)
    inverse = tuple(np.argsort(axes))
    return emit(np.transpose(x.data, axes), (x,),
                lambda g: (np.transpose(g, inverse),))


def concat(tensors, axis=0):
    """Concatenate tensors along an axis (int or name)"""
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise InputError("concat needs at least one tensor")
    ax = _axis(tensors[0], axis)
    ref = tensors[0].shape
    for t in tensors[1:]:
        ok = t.ndim == len(ref) and all(
            n == m for i, (n, m) in enumerate(zip(t.shape, ref)) if i != ax
        )
        if not ok:
            emsg = f"cannot concatenate shapes {ref} and {t.shape} on axis {ax}"
            raise DimensionError(emsg)
    sizes = [t.shape[ax] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(
            np.take(g, np.arange(lo, hi), axis=ax)
            for lo, hi in zip(bounds[:-1], bounds[1:])
        )

    return emit(np.concatenate([t.data for t in tensors], axis=ax),
                tensors, backward)


def stack(tensors, axis=0):
    """Stack equally shaped tensors along a new axis"""
    tensors = [as_tensor(t) for t in tensors]
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise DimensionError(f"cannot stack tensors of shapes {sorted(shapes)}")

    def backward(g):
        return tuple(np.moveaxis(g, axis, 0))

    return emit(np.stack([t.data for t in tensors], axis=axis),
                tensors, backward)


def narrow(x, axis, start, stop):
    """Slice x[start:stop] along one axis (int or name)"""
    ax = _axis(x, axis)
    n = x.shape[ax]
    if not 0 <= start < stop <= n:
        emsg = f"slice {start}:{stop} out of range for axis of length {n}"
        raise DimensionError(emsg)
    index = [slice(None)] * x.ndim
    index[ax] = slice(start, stop)
    index = tuple(index)

    def backward(g):
        gx = np.zeros_like(x.data)
        gx[index] = g
        return (gx,)

    return emit(x.data[index], (x,), backward)


def row(x, i):
    """Row `i` of a matrix as a vector"""
    if x.ndim != 2 or not 0 <= i < x.shape[0]:
        raise DimensionError(f"row {i} out of range for shape {x.shape}")

    def backward(g):
        gx = np.zeros_like(x.data)
        gx[i] = g
        return (gx,)

    return emit(x.data[i], (x,), backward)


# Reductions

def sum(x, axis=None, keepdims=False):
    axes = None if axis is None else _axis(x, axis)
    shape = x.shape

    def backward(g):
        if axes is not None and not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, shape).copy(),)

    return emit(np.sum(x.data, axis=axes, keepdims=keepdims), (x,), backward)


def mean(x, axis=None, keepdims=False):
    n = x.size if axis is None else x.shape[_axis(x, axis)]
    return scale(sum(x, axis=axis, keepdims=keepdims), 1.0 / n)


def set_sum(x):
    """Sum over the rows of `x` independent of their order

    Each column is sorted before it is summed, so any permutation of the
    rows gives a bit-identical result.
    """
    shape = x.shape
    return emit(
        np.sort(x.data, axis=0).sum(axis=0), (x,),
        lambda g: (np.broadcast_to(g, shape).copy(),)
    )


def set_mean(x):
    """Row mean of `x`, independent of row order"""
    return scale(set_sum(x), 1.0 / x.shape[0])


# Losses

def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy of class scores against integer labels

    Parameters
    ----------
    logits: Tensor (B, C)
       unnormalized class scores
    labels: array_like of int (B,)
       class indices in [0, C)

    Returns
    -------
    Tensor
       scalar loss
    """
    if logits.ndim != 2:
        raise DimensionError(f"logits must be (B, C), got {logits.shape}")
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    nb, nc = logits.shape
    if labels.shape[0] != nb:
        emsg = f"{labels.shape[0]} labels for a batch of {nb}"
        raise DimensionError(emsg)
    if np.any(labels < 0) or np.any(labels >= nc):
        raise InputError(f"labels must lie in [0, {nc})")

    logp = log_softmax(logits.data, axis=1)
    loss = -logp[np.arange(nb), labels].mean()

    def backward(g):
        grad = np.exp(logp)
        grad[np.arange(nb), labels] -= 1.0
        return (grad * (g / nb),)

    return emit(np.array(loss), (logits,), backward)


# Recurrent cell

GruParams = namedtuple(
    "GruParams", ["w_z", "b_z", "w_r", "b_r", "w_h", "b_h"]
)
GruParams.__doc__ = """Gated recurrent unit parameters

Each weight acts on the concatenation [h, m] and has shape (2D, D); each
bias has shape (D,).
"""


def gru_cell(h, m, params):
    """Gated recurrent unit update h' = U(h, m)

    Parameters
    ----------
    h: Tensor (D,)
       hidden state
    m: Tensor (D,)
       incoming message
    params: GruParams
       cell parameters

    Returns
    -------
    Tensor (D,)
       (1 - z) * h + z * hc, with gates z, r and candidate hc
    """
    d = h.shape[-1]
    if h.shape != m.shape or params.w_z.shape != (2 * d, d):
        emsg = (
            f"GRU sizes do not agree: h {h.shape}, m {m.shape}, "
            f"weights {params.w_z.shape}"
        )
        raise DimensionError(emsg)
    h2 = reshape(h, (1, d))
    m2 = reshape(m, (1, d))
    hm = concat([h2, m2], axis=1)
    z = sigmoid(add(matmul(hm, params.w_z), params.b_z))
    r = sigmoid(add(matmul(hm, params.w_r), params.b_r))
    rhm = concat([mul(r, h2), m2], axis=1)
    hc = tanh(add(matmul(rhm, params.w_h), params.b_h))
    out = add(mul(sub(1.0, z), h2), mul(z, hc))
    return reshape(out, (d,))
