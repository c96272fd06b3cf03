"""GHN parameters

One `GhnModel` holds every learnable parameter of a graph hypernetwork: the
embedding matrix that projects node one-hots, the GRU node update U, the
message MLP M and the hypernetwork head H (plus, in the anytime space, the
edge head that generates bottleneck weights). The same parameters serve every
node of every graph.
"""
from collections import namedtuple

import numpy as np

from ..errors import ConfigError
from ..arch.graph import (
    STANDARD, ANYTIME, MODES, SPACE_OPS, SCALES,
)
from ..tensor import Tensor, ops


# Roles H can generate; each gets a one-hot next to the node embedding.
ROLES = ("conv", "depthwise", "pointwise", "conv_1x7", "conv_7x1", "stem",
         "classifier")


_ModelDims = namedtuple(
    "_ModelDims",
    ["mode", "hidden", "hyper_hidden", "slab_channels", "max_kernel",
     "tile_bits"],
    defaults=[STANDARD, 32, 64, 8, 7, 6]
)


class ModelDims(_ModelDims):
    """Sizes of a GHN

    Parameters
    ----------
    mode: {"standard", "anytime"}
       search space the model embeds
    hidden: int, default 32
       node embedding size D
    hyper_hidden: int, default 64
       hidden width of the H and M MLPs
    slab_channels: int, default 8
       H emits kernels of slab_channels x slab_channels channels
    max_kernel: int, default 7
       H emits max_kernel x max_kernel kernels; smaller ones are sliced
    tile_bits: int, default 6
       bits of the binary tile position appended to the embedding for each
       channel axis; larger tensors are tiled from up to 2**tile_bits slabs
       per axis
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for key in ("hidden", "hyper_hidden", "slab_channels", "max_kernel",
                    "tile_bits"):
            if int(getattr(self, key)) < 1:
                raise ConfigError(f"ghn {key} must be positive")
        if self.max_kernel < 7:
            emsg = (
                f"max_kernel must cover the largest kernel (7), "
                f"got {self.max_kernel}"
            )
            raise ConfigError(emsg)

    @property
    def onehot_size(self):
        n = len(SPACE_OPS[self.mode])
        if self.mode == ANYTIME:
            n += len(SCALES) + 2
        return n

    @property
    def slab_size(self):
        """Length of the kernel part of one H output"""
        s, k = self.slab_channels, self.max_kernel
        return s * s * k * k

    @property
    def hyper_in(self):
        return self.hidden + 2 * self.tile_bits + len(ROLES)

    @property
    def hyper_out(self):
        return self.slab_size + 2 * self.slab_channels

    @property
    def edge_in(self):
        return 2 * self.hidden + 2 * self.tile_bits


def onehot_indices(node, mode):
    """Positions of the ones in a node's one-hot features"""
    ops_ = SPACE_OPS[mode]
    if node.op not in ops_:
        raise ConfigError(f"op {node.op.value} is not in the {mode} space")
    idx = [ops_.index(node.op)]
    if mode == ANYTIME:
        if node.anytime is None:
            raise ConfigError(f"node {node.id} has no anytime attributes")
        idx.append(len(ops_) + SCALES.index(node.anytime.scale))
        idx.append(len(ops_) + len(SCALES) + int(node.anytime.early_exit))
    return idx


def _uniform(rng, shape, fan_in, gain=1.0):
    bound = gain / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class GhnModel:
    """Learnable parameters of a graph hypernetwork

    Parameters
    ----------
    dims: ModelDims
       sizes of the model
    seed: int or SeedSequence, default 0
       initialization seed

    Attributes
    ----------
    params: dict
       name -> Tensor, in a fixed order
    """

    def __init__(self, dims=None, seed=0):
        self.dims = ModelDims() if dims is None else dims
        self.params = self._init_params(np.random.default_rng(seed))

    def _init_params(self, rng):
        d = self.dims
        D, HH = d.hidden, d.hyper_hidden
        p = {}
        p["embed"] = _uniform(rng, (d.onehot_size, D), d.onehot_size)
        for gate in ("z", "r", "h"):
            p[f"gru.w_{gate}"] = _uniform(rng, (2 * D, D), 2 * D)
            p[f"gru.b_{gate}"] = np.zeros(D)
        p["msg.w1"] = _uniform(rng, (D, D), D)
        p["msg.b1"] = np.zeros(D)
        p["msg.w2"] = _uniform(rng, (D, D), D)
        p["msg.b2"] = np.zeros(D)
        p["hyper.w1"] = _uniform(rng, (HH, d.hyper_in), d.hyper_in)
        p["hyper.b1"] = np.zeros(HH)
        p["hyper.w2"] = _uniform(rng, (d.hyper_out, HH), HH, gain=0.01)
        p["hyper.b2"] = np.zeros(d.hyper_out)
        if d.mode == ANYTIME:
            s2 = d.slab_channels ** 2
            p["edge.w1"] = _uniform(rng, (HH, d.edge_in), d.edge_in)
            p["edge.b1"] = np.zeros(HH)
            p["edge.w2"] = _uniform(rng, (s2, HH), HH, gain=0.01)
            p["edge.b2"] = np.zeros(s2)
        return {k: Tensor(v, requires_grad=True, name=k) for k, v in p.items()}

    @property
    def mode(self):
        return self.dims.mode

    @property
    def hidden(self):
        return self.dims.hidden

    @property
    def gru(self):
        p = self.params
        return ops.GruParams(
            p["gru.w_z"], p["gru.b_z"], p["gru.w_r"], p["gru.b_r"],
            p["gru.w_h"], p["gru.b_h"]
        )

    def message(self, h):
        """M(h) = W2 relu(W1 h + b1) + b2 on rows of h (n, D)"""
        p = self.params
        hidden = ops.relu(ops.linear(h, p["msg.w1"], p["msg.b1"]))
        return ops.linear(hidden, p["msg.w2"], p["msg.b2"])

    def hyper(self, x):
        """H on rows of x (n, hyper_in)"""
        p = self.params
        hidden = ops.relu(ops.linear(x, p["hyper.w1"], p["hyper.b1"]))
        return ops.linear(hidden, p["hyper.w2"], p["hyper.b2"])

    def edge_head(self, x):
        """Edge head on rows of x (n, edge_in)"""
        p = self.params
        hidden = ops.relu(ops.linear(x, p["edge.w1"], p["edge.b1"]))
        return ops.linear(hidden, p["edge.w2"], p["edge.b2"])

    def num_parameters(self):
        return sum(t.size for t in self.params.values())

    def zero_grad(self):
        for t in self.params.values():
            t.zero_grad()

    def grads(self):
        """name -> gradient (None if nothing was accumulated)"""
        return {k: t.grad for k, t in self.params.items()}

    def state_dict(self):
        """name -> copy of the parameter values"""
        return {k: t.data.copy() for k, t in self.params.items()}

    def load_state_dict(self, state):
        missing = set(self.params) - set(state)
        extra = set(state) - set(self.params)
        if missing or extra:
            emsg = (
                f"parameter names do not match the model: "
                f"missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
            raise ConfigError(emsg)
        for k, t in self.params.items():
            v = np.asarray(state[k], dtype=np.float64)
            if v.shape != t.shape:
                emsg = f"parameter {k} has shape {v.shape}, model has {t.shape}"
                raise ConfigError(emsg)
            t.data[...] = v

    def snapshot(self):
        """Read-only copy for evaluation threads"""
        other = GhnModel.__new__(GhnModel)
        other.dims = self.dims
        other.params = {
            k: Tensor(t.data, requires_grad=False, name=k)
            for k, t in self.params.items()
        }
        return other
