"""Weight generation

H maps a node embedding to one fixed-size slab: an S x S x K x K kernel block
(S = slab_channels, K = max_kernel) and 2S affine values. Larger tensors are
tiled: H is evaluated once per (row, column) tile with the binary tile
position and a role one-hot appended to the embedding, and the tiles are
concatenated along both channel axes and cropped. Smaller kernels are the
centred slice of the K x K output. Affine scale is 1 + raw, bias is raw, read
from the column-0 tiles of the last kernel of a node.

All tiles of one node go through a single H evaluation, so a node's weights
depend only on its own embedding and role shapes.
"""
from collections import namedtuple
import math

import numpy as np

from ..errors import ConfigError, ModeError
from ..arch.graph import ANYTIME
from ..arch.network import (
    node_weight_shapes, stem_weight_shapes, classifier_weight_shapes,
)
from ..tensor import Tensor, ops
from .model import ROLES
from .propagation import graph_embedding


AFFINE_ROLES = {"scale": 0, "bias": 1, "classifier_bias": 1}


Weight = namedtuple("Weight", ["role", "tensor"])
Weight.__doc__ = """One generated or owned parameter tensor, tagged with its role"""


GeneratedWeights = namedtuple(
    "GeneratedWeights", ["nodes", "bottlenecks", "exits"]
)
GeneratedWeights.__doc__ = """Weights of the nodes of one block

Parameters
----------
nodes: dict
   node id -> list of Weight for every executed node; pooling and identity
   nodes map to an empty list
bottlenecks: dict
   anytime only: node id -> Tensor (C_out, k * C_in, 1, 1) over the
   concatenated inputs of the node
exits: dict
   anytime only: exit node id -> list of Weight for its classifier
"""


NetworkWeights = namedtuple("NetworkWeights", ["blocks", "stem", "head"])
NetworkWeights.__doc__ = """Weights of a whole candidate network

Parameters
----------
blocks: list of GeneratedWeights
   one per block position
stem: list of Weight
   stem convolution and its affine
head: list of Weight
   final classifier
"""


def tile_bits(index, nbits):
    """Binary code of a tile index, least significant bit first"""
    return [(index >> b) & 1 for b in range(nbits)]


def tile_grid(shape, dims):
    """Number of (row, column) tiles covering a kernel or matrix shape"""
    s = dims.slab_channels
    nr, nc = math.ceil(shape[0] / s), math.ceil(shape[1] / s)
    limit = 2 ** dims.tile_bits
    if nr > limit or nc > limit:
        emsg = (
            f"tensor of shape {tuple(shape)} needs {nr} x {nc} tiles of "
            f"{s} channels; tile_bits={dims.tile_bits} allows at most {limit} "
            f"per axis"
        )
        raise ConfigError(emsg)
    return nr, nc


def _repeat_rows(h, n):
    d = h.size
    return ops.mul(Tensor(np.ones((n, 1))), ops.reshape(h, (1, d)))


def _untile(slabs, nr, nc, s, shape):
    """(nr * nc, S, S, kh, kw) tiles -> tensor cropped to `shape`"""
    kh, kw = slabs.shape[-2:]
    t = ops.reshape(slabs, (nr, nc, s, s, kh, kw))
    t = ops.transpose(t, (0, 2, 1, 3, 4, 5))
    t = ops.reshape(t, (nr * s, nc * s, kh, kw))
    if nr * s != shape[0]:
        t = ops.narrow(t, 0, 0, shape[0])
    if nc * s != shape[1]:
        t = ops.narrow(t, 1, 0, shape[1])
    return t


def _centred(t, axis, k, kmax):
    if k == kmax:
        return t
    start = (kmax - k) // 2
    return ops.narrow(t, axis, start, start + k)


def generate_group(model, h, shapes):
    """Generate the tensors of one weight group from one embedding

    Parameters
    ----------
    model: GhnModel
       parameters of H
    h: Tensor (D,)
       embedding the group is generated from
    shapes: list of (str, tuple)
       (role, shape) pairs; kernel roles are 4-d, "classifier" is 2-d, and
       "scale", "bias" and "classifier_bias" are affine vectors

    Returns
    -------
    list of Weight
       in the order of `shapes`
    """
    dims = model.dims
    s, kmax, nb = dims.slab_channels, dims.max_kernel, dims.tile_bits
    kernels = [(i, role, shape) for i, (role, shape) in enumerate(shapes)
               if role not in AFFINE_ROLES]
    if not kernels:
        return []

    codes, spans = [], []
    for _, role, shape in kernels:
        nr, nc = tile_grid(shape, dims)
        onehot = [0] * len(ROLES)
        onehot[ROLES.index(role)] = 1
        start = len(codes)
        for r in range(nr):
            for c in range(nc):
                codes.append(tile_bits(r, nb) + tile_bits(c, nb) + onehot)
        spans.append((start, nr, nc))

    x = ops.concat([_repeat_rows(h, len(codes)), Tensor(np.array(codes))],
                   axis=1)
    out = model.hyper(x)

    result = [None] * len(shapes)
    for (i, role, shape), (start, nr, nc) in zip(kernels, spans):
        n = nr * nc
        rows = ops.narrow(out, 0, start, start + n)
        slabs = ops.reshape(ops.narrow(rows, 1, 0, dims.slab_size),
                            (n, s, s, kmax, kmax))
        kh, kw = (shape[2], shape[3]) if len(shape) == 4 else (1, 1)
        slabs = _centred(_centred(slabs, 3, kh, kmax), 4, kw, kmax)
        t = _untile(slabs, nr, nc, s, shape)
        result[i] = Weight(role, ops.reshape(t, shape))

    # Affine values come from the column-0 tiles of the last kernel.
    start, nr, nc = spans[-1]
    rows = ops.narrow(out, 0, start, start + nr * nc)
    affine = ops.narrow(rows, 1, dims.slab_size, dims.hyper_out)
    affine = ops.reshape(affine, (nr, nc, 2 * s))
    affine = ops.reshape(ops.narrow(affine, 1, 0, 1), (nr, 2 * s))
    for i, (role, shape) in enumerate(shapes):
        if role not in AFFINE_ROLES:
            continue
        part = AFFINE_ROLES[role]
        raw = ops.narrow(affine, 1, part * s, (part + 1) * s)
        raw = ops.reshape(raw, (nr * s,))
        if nr * s != shape[0]:
            raw = ops.narrow(raw, 0, 0, shape[0])
        if role == "scale":
            raw = ops.add(raw, 1.0)
        result[i] = Weight(role, raw)
    return result


def generate_bottleneck_from_edges(g, state, model, edges, c_out, c_in):
    """Bottleneck weights of a concat node, generated from edge activations

    Each edge (u, v) is embedded as concat(h_u, h_v) and mapped by the edge
    head to a (c_out, c_in, 1, 1) slab; the slabs are concatenated along the
    input channels in the given edge order.

    Parameters
    ----------
    g: ArchGraph
       anytime graph
    state: EmbeddingState
       final embeddings of g
    model: GhnModel
       parameters (anytime mode)
    edges: list of (int, int)
       incoming edges of one node, in the order its inputs are concatenated
    c_out: int
       bottleneck output width
    c_in: int
       width contributed by each edge

    Returns
    -------
    Tensor (c_out, len(edges) * c_in, 1, 1)
    """
    if g.mode != ANYTIME or model.mode != ANYTIME:
        raise ModeError("edge-generated bottlenecks exist only in anytime mode")
    edges = [tuple(e) for e in edges]
    targets = {v for _, v in edges}
    if len(targets) != 1:
        emsg = f"bottleneck edges must share one target node, got {edges}"
        raise ModeError(emsg)

    dims = model.dims
    s, nb = dims.slab_channels, dims.tile_bits
    nr, nc = tile_grid((c_out, c_in), dims)
    n = nr * nc
    codes = Tensor(np.array([tile_bits(r, nb) + tile_bits(c, nb)
                             for r in range(nr) for c in range(nc)]))
    # One edge-head evaluation per edge, so reordering edges only reorders
    # the blocks.
    blocks = []
    for u, v in edges:
        huv = ops.concat([state.h[u], state.h[v]], axis=0)
        x = ops.concat([_repeat_rows(huv, n), codes], axis=1)
        slabs = ops.reshape(model.edge_head(x), (n, s, s, 1, 1))
        blocks.append(_untile(slabs, nr, nc, s, (c_out, c_in)))
    w = ops.concat(blocks, axis=1) if len(blocks) > 1 else blocks[0]
    return ops.reshape(w, (c_out, len(edges) * c_in, 1, 1))


def generate_weights(g, state, model, block_layout, num_classes=None):
    """Weights of every executed node of one block

    Parameters
    ----------
    g: ArchGraph
       block graph
    state: EmbeddingState
       final embeddings of g
    model: GhnModel
       parameters
    block_layout: arch.network.BlockLayout
       channel widths and strides of the block's nodes
    num_classes: int, optional
       anytime only: classes of the exit classifiers

    Returns
    -------
    GeneratedWeights
    """
    nodes, bottlenecks, exits = {}, {}, {}
    for v in block_layout.order:
        nl = block_layout.nodes[v]
        shapes = node_weight_shapes(nl.op, nl.c_in, nl.c_out)
        nodes[v] = generate_group(model, state.h[v], shapes)
        if nl.bottleneck_in is not None:
            edges = g.in_edges(v)
            bottlenecks[v] = generate_bottleneck_from_edges(
                g, state, model, edges, nl.c_in, nl.bottleneck_in // len(edges)
            )
    if g.mode == ANYTIME:
        for v in g.exit_ids:
            shapes = classifier_weight_shapes(block_layout.channels,
                                              num_classes)
            exits[v] = generate_group(model, state.h[v], shapes)
    return GeneratedWeights(nodes, bottlenecks, exits)


def generate_network_weights(spec, states, models, net_layout):
    """Weights of a whole network from per-block embedding states

    The stem is generated from the first block's graph embedding and the head
    from the last block's.

    Parameters
    ----------
    spec: NetworkSpec
       network
    states: list of EmbeddingState
       one per block position
    models: GhnModel or list of GhnModel
       one shared model or one per block position
    net_layout: arch.network.NetworkLayout
       shapes of the network

    Returns
    -------
    NetworkWeights
    """
    if not isinstance(models, (list, tuple)):
        models = [models] * len(states)
    blocks = [
        generate_weights(spec.block, st, m, bl, net_layout.num_classes)
        for st, m, bl in zip(states, models, net_layout.blocks)
    ]
    stem = generate_group(
        models[0], graph_embedding(states[0]),
        stem_weight_shapes(*net_layout.stem)
    )
    head = generate_group(
        models[-1], graph_embedding(states[-1]),
        classifier_weight_shapes(net_layout.head_in, net_layout.num_classes)
    )
    return NetworkWeights(blocks, stem, head)
