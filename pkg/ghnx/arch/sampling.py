"""Random architecture sampling"""
import numpy as np

from ..errors import InputError
from .graph import (
    STANDARD, ANYTIME, MODES, SPACE_OPS, BLOCK_SCALES, ANYTIME_BLOCKS,
    OpKind, Scale, AnytimeAttrs, ArchNode, ArchGraph,
)


MAX_FAN_IN = 2


def as_generator(seed):
    """numpy Generator from an int, a SeedSequence or a Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def split_nodes(n_nodes, nblocks=len(ANYTIME_BLOCKS)):
    """Spread `n_nodes` over the anytime blocks, earlier blocks first"""
    base, extra = divmod(int(n_nodes), nblocks)
    return tuple(base + (1 if b < extra else 0) for b in range(nblocks))


def random_block_sizes(max_per_block, seed):
    """Node count of each anytime block drawn uniformly from [1, max]"""
    rng = as_generator(seed)
    return tuple(int(rng.integers(1, max_per_block + 1))
                 for _ in ANYTIME_BLOCKS)


def _pick_predecessors(rng, earlier):
    k = int(rng.integers(1, MAX_FAN_IN + 1))
    k = min(k, len(earlier))
    picked = rng.choice(len(earlier), size=k, replace=False)
    return sorted(earlier[i] for i in picked)


def sample_block(space, n_nodes, seed, n_exits=1):
    """Sample a random block of the given search space

    Every operator node draws its op uniformly from the space and connects to
    one or two distinct earlier nodes (inputs included), each pattern drawn
    uniformly.

    Parameters
    ----------
    space: {"standard", "anytime"}
       search space
    n_nodes: int or tuple of 3 ints
       number of operator nodes (input nodes not counted); in the anytime
       space a tuple gives the count of each block, and an int is spread
       over the blocks
    seed: int, SeedSequence or Generator
       random source; the same seed gives the same graph
    n_exits: int, default 1
       anytime only: number of nodes carrying early-exit classifiers

    Returns
    -------
    ArchGraph
       a graph that passes `validate`
    """
    if space not in MODES:
        raise InputError(f'space must be one of {MODES}, got {space!r}')
    rng = as_generator(seed)
    if space == STANDARD:
        return _sample_standard(n_nodes, rng)
    return _sample_anytime(n_nodes, n_exits, rng)


def _sample_standard(n_nodes, rng):
    if isinstance(n_nodes, (tuple, list)) or int(n_nodes) < 1:
        emsg = f"standard blocks need n_nodes >= 1, got {n_nodes}"
        raise InputError(emsg)
    ops = SPACE_OPS[STANDARD]
    nodes = [ArchNode(0, OpKind.CONV1X1), ArchNode(1, OpKind.CONV1X1)]
    edges = []
    for v in range(2, int(n_nodes) + 2):
        nodes.append(ArchNode(v, ops[int(rng.integers(len(ops)))]))
        for u in _pick_predecessors(rng, list(range(v))):
            edges.append((u, v))
    return ArchGraph(nodes, edges, (0, 1), STANDARD)


def _sample_anytime(n_nodes, n_exits, rng):
    sizes = (split_nodes(n_nodes) if not isinstance(n_nodes, (tuple, list))
             else tuple(int(n) for n in n_nodes))
    if len(sizes) != len(ANYTIME_BLOCKS) or min(sizes) < 0 or sum(sizes) < 1:
        emsg = (
            f"anytime graphs need a non-negative node count for each of "
            f"{len(ANYTIME_BLOCKS)} blocks and at least one node, got {n_nodes}"
        )
        raise InputError(emsg)
    if not 0 <= n_exits <= sum(sizes):
        emsg = f"cannot place {n_exits} exits on {sum(sizes)} nodes"
        raise InputError(emsg)

    ops = SPACE_OPS[ANYTIME]
    nodes = [ArchNode(0, OpKind.CONV1X1, AnytimeAttrs(Scale.FULL, False, 1))]
    edges = []
    blocks = [b for b, n in zip(ANYTIME_BLOCKS, sizes) for _ in range(n)]
    for v, block in enumerate(blocks, start=1):
        op = ops[int(rng.integers(len(ops)))]
        scales = BLOCK_SCALES[block]
        scale = scales[int(rng.integers(len(scales)))]
        nodes.append(ArchNode(v, op, AnytimeAttrs(scale, False, block)))
        for u in _pick_predecessors(rng, list(range(v))):
            edges.append((u, v))

    exits = set(int(i) + 1 for i in rng.choice(len(blocks), size=n_exits,
                                               replace=False))
    nodes = [
        n._replace(anytime=n.anytime._replace(early_exit=True))
        if n.id in exits else n
        for n in nodes
    ]
    return ArchGraph(nodes, edges, (0,), ANYTIME)
