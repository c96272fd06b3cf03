"""FLOP counting

A convolution or linear layer costs two FLOPs per multiply-accumulate,
C_out * (C_in / groups) * kh * kw MACs per output pixel; pooling,
resampling, affine and additions are free.
"""
from collections import namedtuple
import math

from .network import (
    layout, node_weight_shapes, stem_weight_shapes,
)


KERNEL_ROLES = ("conv", "depthwise", "pointwise", "conv_1x7", "conv_7x1",
                "stem", "bottleneck")


FlopReport = namedtuple(
    "FlopReport", ["stem", "nodes", "blocks", "head", "exits", "total"]
)
FlopReport.__doc__ = """FLOP counts of a network

Parameters
----------
stem: int
   stem convolution
nodes: list of dict
   per block position, node id -> FLOPs (bottleneck included)
blocks: list of int
   total of each block position
head: int
   final classifier
exits: list of (int or str, int)
   for each exit in execution order, the cumulative FLOPs needed to produce
   its prediction; the final head comes last under the key "head"
total: int
   FLOPs of the full forward pass through the final head
"""


def conv_flops(kernel_shape, out_size):
    """FLOPs of a convolution with kernel (C_out, C_in/groups, kh, kw)"""
    return 2 * math.prod(kernel_shape) * out_size[0] * out_size[1]


def linear_flops(c_in, c_out):
    return 2 * c_in * c_out


def node_flops(nl):
    """FLOPs of one laid-out node, its anytime bottleneck included"""
    total = 0
    for role, shape in node_weight_shapes(nl.op, nl.c_in, nl.c_out):
        if role in KERNEL_ROLES:
            total += conv_flops(shape, nl.out_size)
    if nl.bottleneck_in is not None:
        total += conv_flops((nl.c_in, nl.bottleneck_in, 1, 1), nl.in_size)
    return total


def count_flops(spec, image_shape, num_classes):
    """FLOPs of a network, per node, per block and up to each exit

    Parameters
    ----------
    spec: NetworkSpec
       network to cost
    image_shape: (int, int, int)
       (C, H, W) of one input image
    num_classes: int
       classifier outputs

    Returns
    -------
    FlopReport
    """
    lay = layout(spec, image_shape, num_classes)
    image_size = lay.image_shape[1:]
    stem = sum(
        conv_flops(shape, image_size)
        for role, shape in stem_weight_shapes(*lay.stem) if role == "stem"
    )
    nodes, blocks = [], []
    for b in lay.blocks:
        counts = {v: node_flops(b.nodes[v]) for v in b.order}
        nodes.append(counts)
        blocks.append(sum(counts.values()))
    head = linear_flops(lay.head_in, num_classes)
    total = stem + sum(blocks) + head

    exits = []
    exit_width = dict(lay.exits)
    if exit_width:
        b = lay.blocks[0]
        running = stem
        for v in b.order:
            running += nodes[0][v]
            if v in exit_width:
                exits.append((v, running + linear_flops(exit_width[v],
                                                        num_classes)))
    exits.append(("head", total))
    return FlopReport(stem, nodes, blocks, head, exits, total)