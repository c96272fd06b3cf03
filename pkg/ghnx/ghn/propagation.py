"""Message passing over architecture graphs

Every arch node has one embedding. A node update reads the messages
M(h_u) of its in-neighbours, sums them and feeds the sum to the GRU cell U
together with the node's own embedding. Two schedules are supported:

* synchronous: all nodes update at once from the previous step's values;
* forward-backward: nodes update one at a time along a topological order
  s(1..|V|) and back along s(|V|-1..1), each update reading the current
  values, so one sweep performs 2|V|-1 updates. The backward half still
  sums over in-neighbours.

Each node's message and GRU update is computed on its own, and neighbour
messages are summed in sorted order, so relabelling the nodes permutes the
results without changing a single bit.
"""
from collections import namedtuple
import logging

import numpy as np

from ..errors import ConfigError, InputError, NumericError
from ..arch.graph import topological_sort
from ..tensor import Tensor, ops
from .model import GhnModel, onehot_indices


logger = logging.getLogger(__name__)


SYNCHRONOUS, FORWARD_BACKWARD = "synchronous", "forward-backward"
SCHEMES = (SYNCHRONOUS, FORWARD_BACKWARD)
EVERY_STEP, FIRST_STEP = "every-step", "first-step"
DELIVERIES = (EVERY_STEP, FIRST_STEP)


_PropagationScheme = namedtuple("_PropagationScheme", ["kind", "steps"])


class PropagationScheme(_PropagationScheme):
    """Message-passing schedule

    Parameters
    ----------
    kind: {"synchronous", "forward-backward"}
       schedule
    steps: int
       synchronous steps T, or number of full forward-backward sweeps
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.kind not in SCHEMES:
            emsg = f"scheme must be one of {SCHEMES}, got {self.kind!r}"
            raise ConfigError(emsg)
        if int(self.steps) < 0:
            raise ConfigError(f"propagation steps must be >= 0, got {self.steps}")

    @classmethod
    def synchronous(cls, steps):
        return cls(SYNCHRONOUS, int(steps))

    @classmethod
    def forward_backward(cls, passes=5):
        return cls(FORWARD_BACKWARD, int(passes))


EmbeddingState = namedtuple("EmbeddingState", ["h", "step", "updates"])
EmbeddingState.__doc__ = """Node embeddings at one point of propagation

Parameters
----------
h: dict
   node id -> Tensor (D,)
step: int
   completed synchronous steps or forward-backward sweeps
updates: int
   total number of single-node updates applied
"""


def _check_mode(g, model):
    if g.mode != model.mode:
        emsg = (
            f"{g.mode} graph cannot be embedded by a {model.mode} model"
        )
        raise ConfigError(emsg)


def init_embeddings(g, model):
    """Initial embeddings: the embedding matrix applied to each node's one-hot"""
    _check_mode(g, model)
    n = model.dims.onehot_size
    embed = model.params["embed"]
    h = {}
    for node in g.nodes:
        onehot = np.zeros((1, n))
        onehot[0, onehot_indices(node, g.mode)] = 1.0
        h0 = ops.matmul(Tensor(onehot), embed)
        h[node.id] = ops.reshape(h0, (model.hidden,))
    return EmbeddingState(h, 0, 0)


def _check_finite(state, where):
    for v, t in state.h.items():
        if not np.all(np.isfinite(t.data)):
            emsg = f"non-finite embedding for node {v} after {where}"
            raise NumericError(emsg)


class _Messages:
    """M(h_u) per node, recomputed only when h_u changes"""

    def __init__(self, model, h):
        self.model = model
        self.h = h
        self.cache = {}

    def __getitem__(self, u):
        if u not in self.cache:
            hu = ops.reshape(self.h[u], (1, self.model.hidden))
            self.cache[u] = self.model.message(hu)
        return self.cache[u]

    def invalidate(self, u):
        self.cache.pop(u, None)


def _incoming(g, v, messages, hidden, extra):
    preds = g.predecessors(v)
    if preds:
        m = ops.set_sum(ops.concat([messages[u] for u in preds], axis=0))
    else:
        m = Tensor(np.zeros(hidden))
    if extra is not None and v in g.input_ids:
        m = ops.add(m, extra)
    return m


def step_synchronous(g, state, model, extra=None):
    """One synchronous step: every node updates from the previous values

    Parameters
    ----------
    g: ArchGraph
       graph the state belongs to
    state: EmbeddingState
       current embeddings
    model: GhnModel
       parameters
    extra: Tensor (D,), optional
       additional message delivered to the input nodes

    Returns
    -------
    EmbeddingState
    """
    _check_state(g, state)
    messages = _Messages(model, state.h)
    gru = model.gru
    h = {}
    for v in g.node_ids:
        m = _incoming(g, v, messages, model.hidden, extra)
        h[v] = ops.gru_cell(state.h[v], m, gru)
    new = EmbeddingState(h, state.step + 1, state.updates + len(h))
    _check_finite(new, f"synchronous step {new.step}")
    return new


def sweep_order(g):
    """Node order of one forward-backward sweep, 2|V|-1 entries"""
    s = topological_sort(g)
    return s + s[-2::-1]


def step_forward_backward(g, state, model, extra=None, order=None):
    """One forward-backward sweep

    Parameters
    ----------
    g: ArchGraph
       graph the state belongs to
    state: EmbeddingState
       current embeddings
    model: GhnModel
       parameters
    extra: Tensor (D,), optional
       additional message delivered to the input nodes at each of their
       updates
    order: list of int, optional
       topological order to sweep along; defaults to `topological_sort(g)`

    Returns
    -------
    EmbeddingState
       after exactly 2|V|-1 single-node updates
    """
    _check_state(g, state)
    s = topological_sort(g) if order is None else list(order)
    h = dict(state.h)
    messages = _Messages(model, h)
    gru = model.gru
    updates = 0
    for v in s + s[-2::-1]:
        m = _incoming(g, v, messages, model.hidden, extra)
        h[v] = ops.gru_cell(h[v], m, gru)
        messages.invalidate(v)
        updates += 1
    new = EmbeddingState(h, state.step + 1, state.updates + updates)
    _check_finite(new, f"forward-backward sweep {new.step}")
    return new


def _check_state(g, state):
    if set(state.h) != set(g.node_ids):
        emsg = (
            f"embedding state covers nodes {sorted(state.h)}, graph has "
            f"{sorted(g.node_ids)}"
        )
        raise InputError(emsg)


def propagate(g, model, scheme, extra=None, delivery=EVERY_STEP, order=None):
    """Initialize embeddings and run a propagation scheme

    Parameters
    ----------
    g: ArchGraph
       graph to embed
    model: GhnModel
       parameters
    scheme: PropagationScheme
       schedule and number of steps or sweeps
    extra: Tensor (D,), optional
       additional message for the input nodes
    delivery: {"every-step", "first-step"}
       deliver `extra` at every step, or only during the first one
    order: list of int, optional
       forward-backward only: topological order to sweep along

    Returns
    -------
    EmbeddingState
    """
    if delivery not in DELIVERIES:
        raise ConfigError(f"delivery must be one of {DELIVERIES}")
    state = init_embeddings(g, model)
    for t in range(scheme.steps):
        msg = extra if (delivery == EVERY_STEP or t == 0) else None
        if scheme.kind == SYNCHRONOUS:
            state = step_synchronous(g, state, model, msg)
        else:
            state = step_forward_backward(g, state, model, msg, order)
    return state


def graph_embedding(state):
    """Mean of all node embeddings, independent of node order"""
    if not state.h:
        raise InputError("graph embedding of an empty state")
    rows = [ops.reshape(state.h[v], (1, state.h[v].size))
            for v in sorted(state.h)]
    return ops.set_mean(ops.concat(rows, axis=0))


def propagate_stacked(blocks, model, scheme, pass_embeddings=True,
                      delivery=EVERY_STEP):
    """Propagate a stack of blocks, handing each block's graph embedding on

    Block i receives M(h_{A_{i-1}}) as an additional message at its input
    nodes, with h_{A_0} = 0.

    Parameters
    ----------
    blocks: list of ArchGraph
       blocks in network order
    model: GhnModel or list of GhnModel
       one model shared by every block, or one model per block
    scheme: PropagationScheme
       schedule for each block
    pass_embeddings: bool, default True
       if False, blocks are embedded independently
    delivery: {"every-step", "first-step"}
       when the hand-off message reaches the input nodes

    Returns
    -------
    list of EmbeddingState
       one per block
    """
    if not blocks:
        raise InputError("propagate_stacked needs at least one block")
    models = _models_for(blocks, model)
    prev = Tensor(np.zeros(models[0].hidden))
    states = []
    for g, m in zip(blocks, models):
        extra = None
        if pass_embeddings:
            handoff = m.message(ops.reshape(prev, (1, m.hidden)))
            extra = ops.reshape(handoff, (m.hidden,))
        state = propagate(g, m, scheme, extra, delivery)
        states.append(state)
        prev = graph_embedding(state)
    return states


def _models_for(blocks, model):
    if isinstance(model, GhnModel):
        return [model] * len(blocks)
    models = list(model)
    if len(models) != len(blocks):
        emsg = f"{len(models)} models given for {len(blocks)} blocks"
        raise ConfigError(emsg)
    return models
