"""Network specifications and their shape layout

A `NetworkSpec` stacks one block graph into a network. `layout` walks the
spec for a given image shape and fixes, for every node, its channel widths,
stride and spatial size; assembly, FLOP counting and weight generation all
read their shapes from this layout.

Standard networks are a 3x3 stem, `repeat` copies of the block and a
classifier head. Block i reads the outputs of blocks i-2 and i-1 (the stem
stands in for missing blocks) through its two 1x1 input nodes; a reduction
block strides those input nodes by 2 and doubles the width, and an output of
block i-2 that is larger than the output of block i-1 is average-pooled down
first. A block's output is the channel concatenation of its leaves.

Anytime networks are a stem, one graph and a head; every node runs at its own
scale with the same width, and exit classifiers hang off flagged nodes.
"""
from collections import namedtuple

from ..errors import DimensionError, InputError, ModeError
from .graph import (
    STANDARD, ANYTIME, OpKind, check, topological_sort,
)


# Per-op geometry: (family, kernel, dilation).
OP_GEOMETRY = {
    OpKind.IDENTITY: ("identity", 1, 1),
    OpKind.CONV1X1: ("conv", 1, 1),
    OpKind.CONV3X3: ("conv", 3, 1),
    OpKind.CONV5X5: ("conv", 5, 1),
    OpKind.SEP_CONV3X3: ("sep", 3, 1),
    OpKind.SEP_CONV5X5: ("sep", 5, 1),
    OpKind.DIL_SEP_CONV3X3: ("sep", 3, 2),
    OpKind.DIL_SEP_CONV5X5: ("sep", 5, 2),
    OpKind.CONV1X7_7X1: ("conv1x7_7x1", 7, 1),
    OpKind.MAX_POOL3X3: ("max", 3, 1),
    OpKind.AVG_POOL3X3: ("avg", 3, 1),
}

STEM_KERNEL = 3


def node_weight_shapes(op, c_in, c_out):
    """(role, shape) of every parameter an op node needs

    Convolutions are followed by a per-channel affine (roles "scale" and
    "bias"); pooling and identity nodes have no parameters.
    """
    family, k, _ = OP_GEOMETRY[op]
    affine = [("scale", (c_out,)), ("bias", (c_out,))]
    if family == "conv":
        return [("conv", (c_out, c_in, k, k))] + affine
    if family == "sep":
        return [
            ("depthwise", (c_in, 1, k, k)),
            ("pointwise", (c_out, c_in, 1, 1)),
        ] + affine
    if family == "conv1x7_7x1":
        return [
            ("conv_1x7", (c_in, c_in, 1, 7)),
            ("conv_7x1", (c_out, c_in, 7, 1)),
        ] + affine
    if family == "identity" and c_in != c_out:
        emsg = f"identity node cannot map {c_in} channels to {c_out}"
        raise DimensionError(emsg)
    return []


def stem_weight_shapes(image_channels, channels):
    return [
        ("stem", (channels, image_channels, STEM_KERNEL, STEM_KERNEL)),
        ("scale", (channels,)),
        ("bias", (channels,)),
    ]


def classifier_weight_shapes(c_in, num_classes):
    return [
        ("classifier", (num_classes, c_in)),
        ("classifier_bias", (num_classes,)),
    ]


_NetworkSpec = namedtuple(
    "_NetworkSpec", ["block", "repeat", "reductions", "channels", "exits"],
    defaults=[1, (), 16, ()]
)


class NetworkSpec(_NetworkSpec):
    """Network built from a repeated block

    Parameters
    ----------
    block: ArchGraph
       block graph, shared by every position
    repeat: int
       number of block positions
    reductions: tuple of int
       1-based positions of reduction blocks
    channels: int
       width of the stem and of the first block
    exits: tuple of int
       anytime only: ids of the nodes carrying exit classifiers
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.repeat < 1:
            raise InputError(f"repeat must be positive, got {self.repeat}")
        if self.channels < 1:
            raise InputError(f"channels must be positive, got {self.channels}")
        bad = [r for r in self.reductions if not 1 <= r <= self.repeat]
        if bad:
            emsg = (
                f"reduction positions {bad} outside the block range "
                f"[1, {self.repeat}]"
            )
            raise InputError(emsg)
        if self.block.mode == ANYTIME:
            if self.repeat != 1 or self.reductions:
                emsg = "anytime networks hold a single graph and no reductions"
                raise ModeError(emsg)
            if tuple(self.exits) != tuple(self.block.exit_ids):
                emsg = (
                    f"exit nodes {tuple(self.exits)} do not match the nodes "
                    f"flagged early_exit {tuple(self.block.exit_ids)}"
                )
                raise InputError(emsg)
        elif self.exits:
            raise ModeError("exit nodes are only defined in anytime mode")

    @property
    def mode(self):
        return self.block.mode


def stack_blocks(block, repeat, reductions=(), channels=16):
    """Stack a standard block into a network

    Parameters
    ----------
    block: ArchGraph
       valid standard block
    repeat: int
       number of block positions
    reductions: iterable of int
       1-based positions that halve the spatial size and double the width
    channels: int
       initial width

    Returns
    -------
    NetworkSpec
    """
    check(block)
    if block.mode != STANDARD:
        raise ModeError("only standard blocks are stacked; use anytime_network")
    return NetworkSpec(
        block, int(repeat), tuple(sorted(set(int(r) for r in reductions))),
        int(channels)
    )


def anytime_network(graph, channels=16):
    """Network spec of a single anytime graph"""
    check(graph)
    if graph.mode != ANYTIME:
        raise ModeError("anytime_network needs an anytime graph")
    return NetworkSpec(graph, 1, (), int(channels), tuple(graph.exit_ids))


def channel_progression(spec):
    """Widths [stem, block 1, ..., block repeat]"""
    widths = [spec.channels]
    c = spec.channels
    for i in range(1, spec.repeat + 1):
        if i in spec.reductions:
            c *= 2
        widths.append(c)
    return widths


NodeLayout = namedtuple(
    "NodeLayout",
    ["id", "op", "c_in", "c_out", "stride", "in_size", "out_size",
     "factor", "bottleneck_in"]
)
NodeLayout.__doc__ = """Shapes of one executed node

Parameters
----------
id: int
   node id
op: OpKind
   operator
c_in, c_out: int
   channels into and out of the op (after any bottleneck)
stride: int
   op stride (2 only for input nodes of reduction blocks)
in_size, out_size: (int, int)
   spatial size of the op input and output
factor: int
   spatial reduction factor of the node relative to the image
bottleneck_in: int or None
   anytime only: width of the concatenated inputs entering the
   edge-generated bottleneck
"""


BlockLayout = namedtuple(
    "BlockLayout",
    ["index", "channels", "sources", "adapters", "out_size",
     "out_channels", "order", "nodes"]
)
BlockLayout.__doc__ = """Shapes of one block position

Parameters
----------
index: int
   1-based block position
channels: int
   node width
sources: tuple of int
   for each input node, the network output it reads (0 is the stem)
adapters: tuple of int
   for each input node, the average-pool factor applied to its source
out_size: (int, int)
   spatial size of the block output
out_channels: int
   width of the block output (all leaves concatenated)
order: list of int
   execution order of the node ids; unused input nodes are left out
nodes: dict
   node id -> NodeLayout for every executed node
"""


NetworkLayout = namedtuple(
    "NetworkLayout",
    ["mode", "image_shape", "num_classes", "stem", "blocks", "head_in",
     "exits"]
)
NetworkLayout.__doc__ = """Shapes of a whole network

Parameters
----------
mode: {"standard", "anytime"}
   search space
image_shape: (int, int, int)
   (C, H, W) of the input images
num_classes: int
   classifier outputs
stem: (int, int)
   (image channels, stem width)
blocks: list of BlockLayout
   one per block position
head_in: int
   width of the pooled features entering the final classifier
exits: list of (int, int)
   anytime only: (node id, classifier input width) per exit node
"""


def _spatial(size, factor):
    h, w = size
    if h % factor or w % factor:
        emsg = f"spatial size {size} cannot be reduced by a factor {factor}"
        raise DimensionError(emsg)
    return h // factor, w // factor


def layout(spec, image_shape, num_classes):
    """Per-node shapes of `spec` applied to images of `image_shape`

    Parameters
    ----------
    spec: NetworkSpec
       network to lay out
    image_shape: (int, int, int)
       (C, H, W) of one input image
    num_classes: int
       number of classes of the head

    Returns
    -------
    NetworkLayout
    """
    if len(image_shape) != 3 or min(image_shape) < 1:
        raise DimensionError(f"image shape must be (C, H, W), got {image_shape}")
    if num_classes < 1:
        raise InputError(f"num_classes must be positive, got {num_classes}")
    check(spec.block)
    if spec.mode == ANYTIME:
        return _anytime_layout(spec, tuple(image_shape), num_classes)
    return _standard_layout(spec, tuple(image_shape), num_classes)


def _standard_layout(spec, image_shape, num_classes):
    g = spec.block
    widths = channel_progression(spec)
    order_all = topological_sort(g)
    used = set(g.used_input_ids)
    order = [i for i in order_all if i not in g.input_ids or i in used]
    nleaves = len(g.leaves)

    # Output of position j: (channels, size, factor), position 0 is the stem.
    outputs = [(widths[0], image_shape[1:], 1)]
    blocks = []
    for i in range(1, spec.repeat + 1):
        c = widths[i]
        stride = 2 if i in spec.reductions else 1
        sources = (max(i - 2, 0), i - 1)
        _, prev_size, prev_factor = outputs[i - 1]
        in_size = prev_size
        out_size = _spatial(prev_size, stride)
        factor = prev_factor * stride

        adapters, nodes = [], {}
        for j, src in zip(g.input_ids, sources):
            c_src, src_size, src_factor = outputs[src]
            adapt = prev_factor // src_factor
            _spatial(src_size, adapt)
            adapters.append(adapt)
            if j in used:
                nodes[j] = NodeLayout(
                    j, g.node(j).op, c_src, c, stride, in_size, out_size,
                    factor, None
                )
        for v in g.op_ids:
            nodes[v] = NodeLayout(
                v, g.node(v).op, c, c, 1, out_size, out_size, factor, None
            )
        for v, nl in nodes.items():
            node_weight_shapes(nl.op, nl.c_in, nl.c_out)

        out_c = nleaves * c
        blocks.append(BlockLayout(
            i, c, sources, tuple(adapters), out_size, out_c, order, nodes
        ))
        outputs.append((out_c, out_size, factor))

    return NetworkLayout(
        STANDARD, image_shape, num_classes, (image_shape[0], widths[0]),
        blocks, outputs[-1][0], []
    )


def _anytime_layout(spec, image_shape, num_classes):
    g = spec.block
    c = spec.channels
    size = image_shape[1:]
    order = topological_sort(g)
    nodes = {}
    for v in order:
        n = g.node(v)
        f = n.anytime.scale.factor
        s = _spatial(size, f)
        if v in g.input_ids:
            nodes[v] = NodeLayout(v, n.op, c, c, 1, s, s, f, None)
        else:
            k = len(g.predecessors(v))
            nodes[v] = NodeLayout(v, n.op, c, c, 1, s, s, f, k * c)
    block = BlockLayout(
        1, c, (0,), (1,), size, len(g.leaves) * c, order, nodes
    )
    exits = [(v, c) for v in spec.exits]
    return NetworkLayout(
        ANYTIME, image_shape, num_classes, (image_shape[0], c), [block],
        block.out_channels, exits
    )


def count_parameters(spec, image_shape, num_classes):
    """Number of scalar weights of a candidate network"""
    lay = layout(spec, image_shape, num_classes)
    shapes = list(stem_weight_shapes(*lay.stem))
    for b in lay.blocks:
        for nl in b.nodes.values():
            shapes += node_weight_shapes(nl.op, nl.c_in, nl.c_out)
            if nl.bottleneck_in is not None:
                shapes.append(("bottleneck", (nl.c_in, nl.bottleneck_in, 1, 1)))
    for _, c_in in lay.exits:
        shapes += classifier_weight_shapes(c_in, num_classes)
    shapes += classifier_weight_shapes(lay.head_in, num_classes)
    total = 0
    for _, shape in shapes:
        n = 1
        for d in shape:
            n *= d
        total += n
    return total
