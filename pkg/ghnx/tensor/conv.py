"""Convolution, pooling and resampling on (C, H, W) or (B, C, H, W) tensors

Convolutions are cross-correlations (no kernel flip). Windows are gathered
with `numpy.lib.stride_tricks.sliding_window_view`, contracted with
`numpy.einsum`, and gradients are scattered back window offset by window
offset.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, InputError
from . import ops
from .tensor import emit


def _pair(v, name):
    if isinstance(v, (tuple, list)):
        if len(v) != 2:
            raise InputError(f"{name} must be an int or a pair, got {v}")
        return int(v[0]), int(v[1])
    return int(v), int(v)


def output_extent(n, k, stride, padding, dilation):
    """Output length of a sliding window along one axis"""
    return (n + 2 * padding - dilation * (k - 1) - 1) // stride + 1


def _batched(fn):
    """Let a batched (B, C, H, W) operation also take a single (C, H, W)"""
    def wrapper(x, *args, **kwargs):
        if x.ndim == 3:
            out = fn(ops.reshape(x, (1,) + x.shape), *args, **kwargs)
            return ops.reshape(out, out.shape[1:])
        if x.ndim != 4:
            emsg = f"expected a (C, H, W) or (B, C, H, W) tensor, got {x.shape}"
            raise DimensionError(emsg)
        return fn(x, *args, **kwargs)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


class _Windows:
    """Window geometry shared by convolution and pooling"""

    def __init__(self, shape, kernel, stride, padding, dilation):
        _, _, h, w = shape
        self.kh, self.kw = kernel
        self.sh, self.sw = stride
        self.ph, self.pw = padding
        self.dh, self.dw = dilation
        if min(self.sh, self.sw, self.dh, self.dw) < 1 or \
           min(self.ph, self.pw) < 0:
            emsg = (
                f"stride and dilation must be positive and padding "
                f"non-negative: stride={stride}, padding={padding}, "
                f"dilation={dilation}"
            )
            raise InputError(emsg)
        self.ho = output_extent(h, self.kh, self.sh, self.ph, self.dh)
        self.wo = output_extent(w, self.kw, self.sw, self.pw, self.dw)
        if self.ho < 1 or self.wo < 1:
            emsg = (
                f"window {kernel} with stride {stride}, padding {padding}, "
                f"dilation {dilation} does not fit input {shape}"
            )
            raise DimensionError(emsg)
        self.padded = (shape[0], shape[1], h + 2 * self.ph, w + 2 * self.pw)
        self.shape = shape

    def pad(self, x, value=0.0):
        p = ((0, 0), (0, 0), (self.ph, self.ph), (self.pw, self.pw))
        return np.pad(x, p, constant_values=value)

    def gather(self, xp):
        """Windows of the padded input, shape (B, C, Ho, Wo, kh, kw)"""
        eh = self.dh * (self.kh - 1) + 1
        ew = self.dw * (self.kw - 1) + 1
        win = sliding_window_view(xp, (eh, ew), axis=(2, 3))
        return win[:, :, ::self.sh, ::self.sw, ::self.dh, ::self.dw]

    def scatter(self, gcols):
        """Sum window gradients back onto the unpadded input"""
        gx = np.zeros(self.padded)
        hs = self.sh * (self.ho - 1) + 1
        ws = self.sw * (self.wo - 1) + 1
        for i in range(self.kh):
            for j in range(self.kw):
                r0, c0 = i * self.dh, j * self.dw
                gx[:, :, r0:r0 + hs:self.sh, c0:c0 + ws:self.sw] += \
                    gcols[..., i, j]
        return gx[:, :, self.ph:self.ph + self.shape[2],
                  self.pw:self.pw + self.shape[3]]


@_batched
def conv2d(x, w, stride=1, padding=0, dilation=1, groups=1):
    """2-d cross-correlation

    Parameters
    ----------
    x: Tensor (B, C_in, H, W) or (C_in, H, W)
       input feature maps
    w: Tensor (C_out, C_in / groups, kh, kw)
       kernel
    stride, padding, dilation: int or pair of ints
       window geometry; padding is symmetric zero padding
    groups: int, default 1
       number of channel groups; `groups` == C_in gives a depthwise conv

    Returns
    -------
    Tensor (B, C_out, H', W')
       H' = floor((H + 2 padding - dilation (kh - 1) - 1) / stride) + 1
    """
    if w.ndim != 4:
        raise DimensionError(f"kernel must be 4-d, got {w.shape}")
    nb, cin, _, _ = x.shape
    cout, cg, kh, kw = w.shape
    if groups < 1 or cin % groups or cout % groups or cg * groups != cin:
        emsg = (
            f"kernel {w.shape} with groups={groups} does not match "
            f"input channels of {x.shape}"
        )
        raise DimensionError(emsg)
    win = _Windows(x.shape, (kh, kw), _pair(stride, "stride"),
                   _pair(padding, "padding"), _pair(dilation, "dilation"))
    og = cout // groups
    cols = win.gather(win.pad(x.data))
    cols = cols.reshape(nb, groups, cg, win.ho, win.wo, kh, kw)
    wg = w.data.reshape(groups, og, cg, kh, kw)
    out = np.einsum("bgchwij,gocij->bgohw", cols, wg, optimize=True)

    def backward(g):
        g5 = g.reshape(nb, groups, og, win.ho, win.wo)
        gw = np.einsum("bgchwij,bgohw->gocij", cols, g5, optimize=True)
        gcols = np.einsum("bgohw,gocij->bgchwij", g5, wg, optimize=True)
        gcols = gcols.reshape(nb, cin, win.ho, win.wo, kh, kw)
        return win.scatter(gcols), gw.reshape(w.shape)

    return emit(out.reshape(nb, cout, win.ho, win.wo), (x, w), backward)


def separable_conv2d(x, depthwise_w, pointwise_w, stride=1, dilation=1,
                     padding=None):
    """Depthwise convolution followed by a pointwise (1x1) convolution

    Parameters
    ----------
    x: Tensor (B, C, H, W) or (C, H, W)
       input
    depthwise_w: Tensor (C, 1, k, k)
       one spatial filter per input channel
    pointwise_w: Tensor (C_out, C, 1, 1)
       channel mixing
    stride, dilation: int
       depthwise window geometry
    padding: int, optional
       defaults to dilation * (k - 1) // 2, which keeps the spatial size at
       stride 1
    """
    cin = x.shape[-3]
    if depthwise_w.ndim != 4 or depthwise_w.shape[:2] != (cin, 1):
        emsg = (
            f"depthwise kernel {depthwise_w.shape} needs one filter per "
            f"input channel ({cin})"
        )
        raise DimensionError(emsg)
    if pointwise_w.ndim != 4 or pointwise_w.shape[1:] != (cin, 1, 1):
        emsg = f"pointwise kernel {pointwise_w.shape} must be (C_out, {cin}, 1, 1)"
        raise DimensionError(emsg)
    if padding is None:
        padding = dilation * (depthwise_w.shape[2] - 1) // 2
    y = conv2d(x, depthwise_w, stride=stride, padding=padding,
               dilation=dilation, groups=cin)
    return conv2d(y, pointwise_w)


@_batched
def pool2d(x, kind, k=3, stride=1, padding=0):
    """Windowed max or mean

    Max pooling sends the gradient to the first (row-major) maximal element
    of each window. Average pooling divides by the number of in-bounds
    elements, so a constant input stays constant at the borders.
    """
    if kind not in ("max", "avg"):
        raise InputError(f'pool kind must be "max" or "avg", got {kind!r}')
    win = _Windows(x.shape, _pair(k, "k"), _pair(stride, "stride"),
                   _pair(padding, "padding"), (1, 1))
    kk = win.kh * win.kw
    lead = x.shape[:2] + (win.ho, win.wo)

    if kind == "max":
        cols = win.gather(win.pad(x.data, -np.inf)).reshape(lead + (kk,))
        arg = cols.argmax(axis=-1)
        out = np.take_along_axis(cols, arg[..., None], axis=-1)[..., 0]

        def backward(g):
            gcols = np.zeros(lead + (kk,))
            np.put_along_axis(gcols, arg[..., None], g[..., None], axis=-1)
            return (win.scatter(gcols.reshape(lead + (win.kh, win.kw))),)

        return emit(out, (x,), backward)

    ones = np.ones((1, 1) + x.shape[2:])
    counts = win.gather(win.pad(ones)).sum(axis=(-2, -1))
    cols = win.gather(win.pad(x.data))
    out = cols.sum(axis=(-2, -1)) / counts

    def backward(g):
        gw = (g / counts)[..., None, None]
        gcols = np.broadcast_to(gw, lead + (win.kh, win.kw))
        return (win.scatter(gcols),)

    return emit(out, (x,), backward)


@_batched
def upsample(x, factor):
    """Nearest-neighbour upsampling by an integer factor"""
    f = int(factor)
    if f < 1:
        raise InputError(f"upsampling factor must be positive, got {factor}")
    out = np.repeat(np.repeat(x.data, f, axis=2), f, axis=3)
    nb, c, h, w = x.shape

    def backward(g):
        return (g.reshape(nb, c, h, f, w, f).sum(axis=(3, 5)),)

    return emit(out, (x,), backward)


@_batched
def downsample(x, factor):
    """Average pooling over non-overlapping factor x factor blocks"""
    f = int(factor)
    nb, c, h, w = x.shape
    if f < 1 or h % f or w % f:
        emsg = f"cannot downsample spatial size {(h, w)} by {factor}"
        raise DimensionError(emsg)
    out = x.data.reshape(nb, c, h // f, f, w // f, f).mean(axis=(3, 5))

    def backward(g):
        gx = np.repeat(np.repeat(g, f, axis=2), f, axis=3)
        return (gx / (f * f),)

    return emit(out, (x,), backward)


def resample(x, factor_in, factor_out):
    """Bring a map from scale `factor_in` to scale `factor_out`

    Factors are spatial reduction factors (1 = full size, 2 = half, ...).
    """
    if factor_out > factor_in:
        return downsample(x, factor_out // factor_in)
    if factor_out < factor_in:
        return upsample(x, factor_in // factor_out)
    return x


def global_avg_pool(x):
    """Spatial mean, (B, C, H, W) -> (B, C)"""
    if x.ndim != 4:
        raise DimensionError(f"expected (B, C, H, W), got {x.shape}")
    nb, c, h, w = x.shape
    return ops.mean(ops.reshape(x, (nb, c, h * w)), axis=2)


def channel_affine(x, scale, bias):
    """Per-channel x * scale + bias on (B, C, H, W)"""
    c = x.shape[1]
    if scale.shape != (c,) or bias.shape != (c,):
        emsg = (
            f"affine scale {scale.shape} and bias {bias.shape} do not match "
            f"{c} channels"
        )
        raise DimensionError(emsg)
    s = ops.reshape(scale, (1, c, 1, 1))
    b = ops.reshape(bias, (1, c, 1, 1))
    return ops.add(ops.mul(x, s), b)
