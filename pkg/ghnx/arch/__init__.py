"""Candidate architectures: graphs, sampling, networks, FLOPs and JSON"""
from .graph import (
    STANDARD, ANYTIME, MODES, OpKind, Scale, AnytimeAttrs, ArchNode, ArchGraph,
    STANDARD_OPS, ANYTIME_OPS, BLOCK_SCALES,
    topological_sort, validate, check, relabel,
)
from .sampling import sample_block, split_nodes, random_block_sizes
from .network import (
    NetworkSpec, stack_blocks, anytime_network, channel_progression, layout,
    node_weight_shapes, count_parameters,
)
from .flops import count_flops, FlopReport
from .serialize import serialize, deserialize, graph_hash
