"""Architecture graphs

A candidate architecture is a DAG whose nodes carry operator kinds. Standard
blocks have two 1x1 bottleneck input nodes and sum the inputs of each node;
anytime graphs have one bottleneck input node, concatenate node inputs, and
give every node a scale, a block index and an early-exit flag.
"""
from collections import namedtuple
import enum
import heapq

from ..errors import GraphError


STANDARD, ANYTIME = "standard", "anytime"
MODES = (STANDARD, ANYTIME)
JOIN = {STANDARD: "sum", ANYTIME: "concat"}


class OpKind(enum.Enum):
    """Operator kinds of both search spaces"""
    IDENTITY = "identity"
    CONV1X1 = "conv1x1"
    SEP_CONV3X3 = "sep_conv3x3"
    SEP_CONV5X5 = "sep_conv5x5"
    DIL_SEP_CONV3X3 = "dil_sep_conv3x3"
    DIL_SEP_CONV5X5 = "dil_sep_conv5x5"
    CONV1X7_7X1 = "conv1x7_7x1"
    MAX_POOL3X3 = "max_pool3x3"
    AVG_POOL3X3 = "avg_pool3x3"
    CONV3X3 = "conv3x3"
    CONV5X5 = "conv5x5"


STANDARD_OPS = (
    OpKind.IDENTITY, OpKind.CONV1X1, OpKind.SEP_CONV3X3, OpKind.SEP_CONV5X5,
    OpKind.DIL_SEP_CONV3X3, OpKind.DIL_SEP_CONV5X5, OpKind.CONV1X7_7X1,
    OpKind.MAX_POOL3X3, OpKind.AVG_POOL3X3,
)
ANYTIME_OPS = (
    OpKind.CONV1X1, OpKind.CONV3X3, OpKind.CONV5X5,
    OpKind.MAX_POOL3X3, OpKind.AVG_POOL3X3,
)
SPACE_OPS = {STANDARD: STANDARD_OPS, ANYTIME: ANYTIME_OPS}

POOL_OPS = (OpKind.MAX_POOL3X3, OpKind.AVG_POOL3X3)
PARAMETER_FREE_OPS = POOL_OPS + (OpKind.IDENTITY,)


class Scale(enum.Enum):
    """Spatial scale of an anytime node, by reduction factor"""
    FULL = "full"
    HALF = "half"
    QUARTER = "quarter"

    @property
    def factor(self):
        return {"full": 1, "half": 2, "quarter": 4}[self.value]


SCALES = (Scale.FULL, Scale.HALF, Scale.QUARTER)

# Later anytime blocks only operate at coarser scales.
BLOCK_SCALES = {
    1: (Scale.FULL, Scale.HALF, Scale.QUARTER),
    2: (Scale.HALF, Scale.QUARTER),
    3: (Scale.QUARTER,),
}
ANYTIME_BLOCKS = tuple(BLOCK_SCALES)


AnytimeAttrs = namedtuple("AnytimeAttrs", ["scale", "early_exit", "block"])
AnytimeAttrs.__doc__ = """Extra node attributes of anytime graphs

Parameters
----------
scale: Scale
   spatial scale the node operates at
early_exit: bool
   True if an early-exit classifier reads this node
block: int
   anytime block (1, 2 or 3) the node belongs to
"""


ArchNode = namedtuple("ArchNode", ["id", "op", "anytime"], defaults=[None])
ArchNode.__doc__ = """Node of an architecture graph

Parameters
----------
id: int
   node id, unique within the graph
op: OpKind
   operator applied by the node
anytime: AnytimeAttrs or None
   present iff the graph is in anytime mode
"""


_ArchGraph = namedtuple(
    "_ArchGraph", ["nodes", "edges", "input_ids", "mode", "join"]
)


class ArchGraph(_ArchGraph):
    """Directed acyclic computation graph of a block

    Parameters
    ----------
    nodes: tuple of ArchNode
       nodes in id order
    edges: tuple of (int, int)
       ordered (source id, destination id) pairs; order fixes how concat
       inputs are laid out
    input_ids: tuple of int
       ids of the input (bottleneck) nodes
    mode: {"standard", "anytime"}
       search space the graph belongs to
    join: {"sum", "concat"}
       how a node combines its inputs; must match the mode
    """

    def __new__(cls, nodes, edges, input_ids, mode=STANDARD, join=None):
        if join is None:
            join = JOIN.get(mode)
        return super().__new__(
            cls, tuple(nodes), tuple(tuple(e) for e in edges),
            tuple(input_ids), mode, join
        )

    @property
    def node_ids(self):
        return [n.id for n in self.nodes]

    @property
    def node_map(self):
        return {n.id: n for n in self.nodes}

    def node(self, node_id):
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def predecessors(self, node_id):
        """Source ids of edges into `node_id`, in edge order"""
        return [u for u, v in self.edges if v == node_id]

    def successors(self, node_id):
        return [v for u, v in self.edges if u == node_id]

    def in_edges(self, node_id):
        return [e for e in self.edges if e[1] == node_id]

    @property
    def op_ids(self):
        """Ids of the non-input nodes"""
        inputs = set(self.input_ids)
        return [n.id for n in self.nodes if n.id not in inputs]

    @property
    def leaves(self):
        """Non-input nodes without outgoing edges, in id order"""
        sources = {u for u, _ in self.edges}
        return sorted(i for i in self.op_ids if i not in sources)

    @property
    def used_input_ids(self):
        sources = {u for u, _ in self.edges}
        return [i for i in self.input_ids if i in sources]

    @property
    def exit_ids(self):
        """Nodes carrying an early-exit classifier (anytime only)"""
        return sorted(
            n.id for n in self.nodes
            if n.anytime is not None and n.anytime.early_exit
        )


def topological_sort(g):
    """Topological order of node ids, ties broken by ascending id

    Parameters
    ----------
    g: ArchGraph
       graph to sort

    Returns
    -------
    list of int
       ids such that every edge runs from an earlier to a later position

    Raises
    ------
    GraphError
       if the graph has a cycle; `witness` holds the ids of one cycle
    """
    ids = g.node_ids
    indeg = {i: 0 for i in ids}
    succ = {i: [] for i in ids}
    for u, v in g.edges:
        if u not in indeg or v not in indeg:
            raise GraphError(f"edge ({u}, {v}) names an unknown node")
        indeg[v] += 1
        succ[u].append(v)

    heap = [i for i in ids if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)

    if len(order) != len(ids):
        witness = _find_cycle(g, {i for i in ids if indeg[i] > 0})
        emsg = f"graph has a cycle through nodes {witness}"
        raise GraphError(emsg, witness=witness)
    return order


def _find_cycle(g, remaining):
    """Walk backwards inside the unsorted remainder until a node repeats"""
    preds = {i: [u for u, v in g.edges if v == i and u in remaining]
             for i in remaining}
    node = min(remaining)
    seen = []
    while node not in seen:
        seen.append(node)
        node = min(preds[node])
    cycle = seen[seen.index(node):]
    cycle.reverse()
    return cycle


def validate(g):
    """Check a graph and return every violation found

    Parameters
    ----------
    g: ArchGraph
       graph to check

    Returns
    -------
    list of str
       violations; empty when the graph is valid
    """
    problems = []
    ids = g.node_ids
    idset = set(ids)

    if g.mode not in MODES:
        problems.append(f"unknown mode {g.mode!r}")
        return problems
    if g.join != JOIN[g.mode]:
        problems.append(
            f"join {g.join!r} not allowed in {g.mode} mode "
            f"(expected {JOIN[g.mode]!r})"
        )
    if len(idset) != len(ids):
        problems.append("duplicate node ids")

    nin = 2 if g.mode == STANDARD else 1
    if len(g.input_ids) != nin:
        problems.append(
            f"{g.mode} graphs need exactly {nin} input node(s), "
            f"found {len(g.input_ids)}"
        )
    for i in g.input_ids:
        if i not in idset:
            problems.append(f"input node {i} is not a graph node")

    bad_edges = [(u, v) for u, v in g.edges
                 if u not in idset or v not in idset]
    for u, v in bad_edges:
        problems.append(f"edge ({u}, {v}) names an unknown node")
    if len(set(g.edges)) != len(g.edges):
        problems.append("duplicate edges")
    for u, v in g.edges:
        if u == v:
            problems.append(f"self loop on node {u}")

    if not bad_edges:
        try:
            topological_sort(g)
        except GraphError as e:
            problems.append(f"cycle through nodes {e.witness}")

    targets = {v for _, v in g.edges}
    for i in g.input_ids:
        if i in targets:
            problems.append(f"input node {i} has an incoming edge")
    for i in g.op_ids:
        if i not in targets:
            problems.append(f"orphan node {i} has no incoming edge")
    if not g.op_ids:
        problems.append("graph has no operator nodes")

    allowed = SPACE_OPS[g.mode]
    for n in g.nodes:
        if not isinstance(n.op, OpKind) or n.op not in allowed:
            problems.append(f"node {n.id}: op {n.op} not in the {g.mode} space")
        if n.id in g.input_ids and n.op != OpKind.CONV1X1:
            problems.append(f"input node {n.id} must be a conv1x1 bottleneck")
        problems.extend(_check_anytime(g, n))

    return problems


def _check_anytime(g, n):
    problems = []
    if g.mode == STANDARD:
        if n.anytime is not None:
            problems.append(f"node {n.id}: anytime attributes in standard mode")
        return problems

    a = n.anytime
    if a is None:
        return [f"node {n.id}: anytime attributes missing"]
    if a.block not in BLOCK_SCALES:
        return [f"node {n.id}: unknown anytime block {a.block}"]
    if a.scale not in BLOCK_SCALES[a.block]:
        problems.append(
            f"node {n.id}: scale not allowed in block {a.block} "
            f"({a.scale.value if isinstance(a.scale, Scale) else a.scale})"
        )
    if n.id in g.input_ids and a.early_exit:
        problems.append(f"input node {n.id} cannot carry an early exit")
    return problems


def check(g):
    """Raise GraphError listing all violations, if any"""
    problems = validate(g)
    if problems:
        raise GraphError("invalid graph: " + "; ".join(problems))
    return g


def relabel(g, mapping):
    """Copy of `g` with node ids renamed by `mapping` (old id -> new id)

    Nodes are re-sorted by their new ids; edge order is kept.
    """
    nodes = sorted(
        (ArchNode(mapping[n.id], n.op, n.anytime) for n in g.nodes),
        key=lambda n: n.id
    )
    edges = [(mapping[u], mapping[v]) for u, v in g.edges]
    inputs = [mapping[i] for i in g.input_ids]
    return ArchGraph(nodes, edges, inputs, g.mode, g.join)
