"""Executable candidate networks

`assemble` binds a network layout to a full set of weights (generated by a
GHN or owned by the candidate) and checks every tensor against the shapes the
layout demands. The resulting `CandidateNet` is a pure function of its
weights: calling it twice on the same batch gives bit-identical logits.
"""
from collections import namedtuple

import numpy as np

from ..errors import AssemblyError, DimensionError, InputError
from ..arch.graph import ANYTIME, STANDARD
from ..arch.network import (
    OP_GEOMETRY, stack_blocks, anytime_network, node_weight_shapes,
    stem_weight_shapes, classifier_weight_shapes,
)
from ..arch.sampling import as_generator
from ..ghn.hypernet import Weight, GeneratedWeights, NetworkWeights
from ..ghn.hypernet import generate_network_weights
from ..ghn.model import GhnModel
from ..ghn.propagation import propagate, propagate_stacked, EVERY_STEP
from ..tensor import Tensor, ops, conv
from ..utils import stream


Batch = namedtuple("Batch", ["images", "labels"])
Batch.__doc__ = """Labelled images

Parameters
----------
images: Tensor (B, C, H, W)
   inputs
labels: ndarray of int (B,)
   class indices
"""


Outputs = namedtuple("Outputs", ["logits", "exits"])
Outputs.__doc__ = """Network predictions

Parameters
----------
logits: Tensor (B, num_classes)
   final head
exits: list of (int, Tensor)
   anytime only: (exit node id, logits) in execution order
"""


Loss = namedtuple("Loss", ["total", "parts"])
Loss.__doc__ = """Training loss

Parameters
----------
total: Tensor
   scalar loss that is minimized
parts: list of (int or str, Tensor)
   cross-entropy of each exit and of the final head (key "head")
"""


MacroConfig = namedtuple(
    "MacroConfig", ["repeat", "reductions", "channels"],
    defaults=[1, (), 16]
)
MacroConfig.__doc__ = """How a block graph becomes a network

Parameters
----------
repeat: int
   block positions (standard only)
reductions: tuple of int
   1-based reduction positions (standard only)
channels: int
   initial width
"""


GhnSetup = namedtuple(
    "GhnSetup", ["models", "scheme", "pass_embeddings", "delivery"],
    defaults=[True, EVERY_STEP]
)
GhnSetup.__doc__ = """How a GHN embeds a network

Parameters
----------
models: GhnModel or list of GhnModel
   a model shared by all block positions, or one model per position
scheme: PropagationScheme
   message-passing schedule
pass_embeddings: bool
   hand each block's graph embedding to the next block
delivery: {"every-step", "first-step"}
   when the hand-off message reaches the input nodes
"""


# Stacked variants: parameter sharing (SP) and passing embeddings (PE).
SHARED_PASSING, PASSING_ONLY, INDEPENDENT = "sp+pe", "pe", "independent"
VARIANTS = (SHARED_PASSING, PASSING_ONLY, INDEPENDENT)


def build_setup(dims, scheme, seed, variant=SHARED_PASSING, repeat=1,
                delivery=EVERY_STEP):
    """Fresh GHN models for a stacked variant

    Parameters
    ----------
    dims: ghn.model.ModelDims
       model sizes
    scheme: PropagationScheme
       message-passing schedule
    seed: int
       run seed; models draw from the "ghn-init" stream
    variant: {"sp+pe", "pe", "independent"}
       "sp+pe" shares one model and passes embeddings, "pe" has one model
       per block position and passes embeddings, "independent" has one model
       per position and embeds every block on its own
    repeat: int
       block positions

    Returns
    -------
    GhnSetup
    """
    if variant not in VARIANTS:
        raise InputError(f"stacked variant must be one of {VARIANTS}, got {variant!r}")
    if variant == SHARED_PASSING:
        models = GhnModel(dims, stream(seed, "ghn-init"))
    else:
        models = [GhnModel(dims, stream(seed, "ghn-init", i))
                  for i in range(repeat)]
    return GhnSetup(models, scheme, variant != INDEPENDENT, delivery)


def network_for(g, macro):
    """NetworkSpec of a block graph under a macro configuration"""
    if g.mode == ANYTIME:
        return anytime_network(g, macro.channels)
    return stack_blocks(g, macro.repeat, macro.reductions, macro.channels)


def _check_bundle(bundle, shapes, where):
    if bundle is None:
        raise AssemblyError(f"missing weights for {where}", node=where)
    got = [(w.role, tuple(w.tensor.shape)) for w in bundle]
    want = [(role, tuple(shape)) for role, shape in shapes]
    if got != want:
        emsg = f"weights for {where} are {got}, expected {want}"
        raise AssemblyError(emsg, node=where)
    return {w.role: w.tensor for w in bundle}


def assemble(spec, weights, net_layout):
    """Bind weights to a network

    Parameters
    ----------
    spec: NetworkSpec
       network
    weights: NetworkWeights
       generated or owned weights
    net_layout: arch.network.NetworkLayout
       shapes of `spec`

    Returns
    -------
    CandidateNet

    Raises
    ------
    AssemblyError
       naming the node whose weights are missing or mis-shaped
    """
    lay = net_layout
    if len(weights.blocks) != len(lay.blocks):
        emsg = (
            f"weights for {len(weights.blocks)} blocks, network has "
            f"{len(lay.blocks)}"
        )
        raise AssemblyError(emsg, node="blocks")
    stem = _check_bundle(weights.stem, stem_weight_shapes(*lay.stem), "stem")
    head = _check_bundle(
        weights.head, classifier_weight_shapes(lay.head_in, lay.num_classes),
        "head"
    )
    blocks = []
    for bl, gw in zip(lay.blocks, weights.blocks):
        nodes, bottlenecks, exits = {}, {}, {}
        for v in bl.order:
            nl = bl.nodes[v]
            nodes[v] = _check_bundle(
                gw.nodes.get(v), node_weight_shapes(nl.op, nl.c_in, nl.c_out),
                v
            )
            if nl.bottleneck_in is not None:
                b = gw.bottlenecks.get(v)
                want = (nl.c_in, nl.bottleneck_in, 1, 1)
                if b is None or tuple(b.shape) != want:
                    got = None if b is None else tuple(b.shape)
                    emsg = f"bottleneck of node {v} is {got}, expected {want}"
                    raise AssemblyError(emsg, node=v)
                bottlenecks[v] = b
        for v, c_in in lay.exits:
            exits[v] = _check_bundle(
                gw.exits.get(v), classifier_weight_shapes(c_in, lay.num_classes),
                f"exit {v}"
            )
        blocks.append((nodes, bottlenecks, exits))
    return CandidateNet(spec, lay, stem, blocks, head)


def _affine(x, w):
    return conv.channel_affine(x, w["scale"], w["bias"])


def apply_op(op, x, w, stride=1):
    """Run one node's operator on x (B, C, H, W)

    Convolutions are relu -> conv -> affine; pools use a 3x3 window with
    stride 1 and padding 1.
    """
    family, k, dilation = OP_GEOMETRY[op]
    if family == "identity":
        return x
    if family in ("max", "avg"):
        return conv.pool2d(x, family, k=k, stride=1, padding=k // 2)
    y = ops.relu(x)
    if family == "conv":
        y = conv.conv2d(y, w["conv"], stride=stride, padding=k // 2)
    elif family == "sep":
        y = conv.separable_conv2d(y, w["depthwise"], w["pointwise"],
                                  stride=stride, dilation=dilation)
    else:
        y = conv.conv2d(y, w["conv_1x7"], stride=stride, padding=(0, 3))
        y = conv.conv2d(y, w["conv_7x1"], padding=(3, 0))
    return _affine(y, w)


def _classify(x, w):
    return ops.linear(x, w["classifier"], w["classifier_bias"])


class CandidateNet:
    """Candidate network bound to its weights

    Parameters
    ----------
    spec: NetworkSpec
       network
    net_layout: arch.network.NetworkLayout
       shapes of the network
    stem, head: dict
       role -> Tensor
    blocks: list of (dict, dict, dict)
       per block position: node weights (id -> role -> Tensor), anytime
       bottlenecks (id -> Tensor) and exit classifiers (id -> role -> Tensor)
    """

    def __init__(self, spec, net_layout, stem, blocks, head):
        self.spec = spec
        self.layout = net_layout
        self.stem = stem
        self.blocks = blocks
        self.head = head

    @property
    def mode(self):
        return self.spec.mode

    def check_batch(self, images):
        want = tuple(self.layout.image_shape)
        if images.ndim != 4 or tuple(images.shape[1:]) != want:
            emsg = f"images of shape {images.shape} do not match (B,) + {want}"
            raise DimensionError(emsg)

    def __call__(self, images):
        """Predictions for a batch of images

        Parameters
        ----------
        images: Tensor (B, C, H, W)

        Returns
        -------
        Outputs
        """
        self.check_batch(images)
        x = _affine(
            conv.conv2d(images, self.stem["stem"], padding=1), self.stem
        )
        if self.mode == STANDARD:
            return self._standard(x)
        return self._anytime(x)

    def _standard(self, x):
        g = self.spec.block
        outputs = [x]
        for bl, (nodes, _, _) in zip(self.layout.blocks, self.blocks):
            vals = {}
            for j, src, adapt in zip(g.input_ids, bl.sources, bl.adapters):
                if j not in bl.nodes:
                    continue
                inp = outputs[src]
                if adapt > 1:
                    inp = conv.downsample(inp, adapt)
                nl = bl.nodes[j]
                vals[j] = apply_op(nl.op, inp, nodes[j], stride=nl.stride)
            for v in bl.order:
                if v in vals:
                    continue
                preds = g.predecessors(v)
                s = vals[preds[0]]
                for u in preds[1:]:
                    s = ops.add(s, vals[u])
                vals[v] = apply_op(bl.nodes[v].op, s, nodes[v])
            leaves = [vals[v] for v in g.leaves]
            out = ops.concat(leaves, axis="channel") if len(leaves) > 1 \
                else leaves[0]
            outputs.append(out)
        pooled = conv.global_avg_pool(outputs[-1])
        return Outputs(_classify(pooled, self.head), [])

    def _anytime(self, x):
        g = self.spec.block
        bl = self.layout.blocks[0]
        nodes, bottlenecks, exits = self.blocks[0]
        vals = {}
        exit_logits = []
        for v in bl.order:
            nl = bl.nodes[v]
            if v in g.input_ids:
                vals[v] = apply_op(nl.op, x, nodes[v])
                continue
            inputs = [
                conv.resample(vals[u], bl.nodes[u].factor, nl.factor)
                for u in g.predecessors(v)
            ]
            y = ops.concat(inputs, axis="channel") if len(inputs) > 1 \
                else inputs[0]
            y = conv.conv2d(y, bottlenecks[v])
            vals[v] = apply_op(nl.op, y, nodes[v])
            if v in exits:
                pooled = conv.global_avg_pool(vals[v])
                exit_logits.append((v, _classify(pooled, exits[v])))
        pooled = ops.concat(
            [conv.global_avg_pool(vals[v]) for v in g.leaves], axis=1
        )
        return Outputs(_classify(pooled, self.head), exit_logits)


def forward_loss(net, batch):
    """Cross-entropy of a batch

    In the anytime space the loss is the mean of the cross-entropies of all
    exits and the final head.

    Returns
    -------
    Loss
    """
    out = net(batch.images)
    head = ops.softmax_cross_entropy(out.logits, batch.labels)
    parts = [(v, ops.softmax_cross_entropy(logits, batch.labels))
             for v, logits in out.exits]
    parts.append(("head", head))
    if len(parts) == 1:
        return Loss(head, parts)
    total = parts[0][1]
    for _, p in parts[1:]:
        total = ops.add(total, p)
    return Loss(ops.scale(total, 1.0 / len(parts)), parts)


def generate_candidate(setup, spec, net_layout):
    """Embed a network with a GHN and assemble it with generated weights"""
    models = setup.models
    g = spec.block
    if spec.mode == ANYTIME:
        model = models if isinstance(models, GhnModel) else models[0]
        states = [propagate(g, model, setup.scheme)]
    else:
        states = propagate_stacked(
            [g] * spec.repeat, models, setup.scheme,
            pass_embeddings=setup.pass_embeddings, delivery=setup.delivery
        )
    weights = generate_network_weights(spec, states, models, net_layout)
    return assemble(spec, weights, net_layout)


# Owned weights, for candidates trained from scratch.

_KERNEL_ROLES = ("conv", "depthwise", "pointwise", "conv_1x7", "conv_7x1",
                 "stem")


def _owned_tensor(rng, role, shape, name):
    if role == "scale":
        data = np.ones(shape)
    elif role in ("bias", "classifier_bias"):
        data = np.zeros(shape)
    else:
        fan_in = int(np.prod(shape[1:]))
        gain = np.sqrt(6.0) if role in _KERNEL_ROLES else 1.0
        bound = gain / np.sqrt(fan_in)
        data = rng.uniform(-bound, bound, size=shape)
    return Tensor(data, requires_grad=True, name=name)


def _owned_group(rng, shapes, prefix):
    return [
        Weight(role, _owned_tensor(rng, role, shape, f"{prefix}.{role}"))
        for role, shape in shapes
    ]


def init_owned_weights(net_layout, seed):
    """Independently initialized weights for every part of a network

    Kernels are uniform with bound sqrt(6 / fan_in), classifiers uniform
    with bound 1 / sqrt(fan_in), affine scales one and biases zero.
    """
    rng = as_generator(seed)
    lay = net_layout
    stem = _owned_group(rng, stem_weight_shapes(*lay.stem), "stem")
    blocks = []
    for bl in lay.blocks:
        pre = f"block{bl.index}"
        nodes, bottlenecks, exits = {}, {}, {}
        for v in bl.order:
            nl = bl.nodes[v]
            nodes[v] = _owned_group(
                rng, node_weight_shapes(nl.op, nl.c_in, nl.c_out),
                f"{pre}.node{v}"
            )
            if nl.bottleneck_in is not None:
                bottlenecks[v] = _owned_tensor(
                    rng, "bottleneck", (nl.c_in, nl.bottleneck_in, 1, 1),
                    f"{pre}.node{v}.bottleneck"
                )
        for v, c_in in lay.exits:
            exits[v] = _owned_group(
                rng, classifier_weight_shapes(c_in, lay.num_classes),
                f"{pre}.exit{v}"
            )
        blocks.append(GeneratedWeights(nodes, bottlenecks, exits))
    head = _owned_group(
        rng, classifier_weight_shapes(lay.head_in, lay.num_classes), "head"
    )
    return NetworkWeights(blocks, stem, head)


def weight_parameters(weights):
    """name -> Tensor for every tensor of a NetworkWeights"""
    params = {}

    def add(group):
        for w in group:
            params[w.tensor.name] = w.tensor

    add(weights.stem)
    for gw in weights.blocks:
        for v in sorted(gw.nodes):
            add(gw.nodes[v])
        for v in sorted(gw.bottlenecks):
            t = gw.bottlenecks[v]
            params[t.name] = t
        for v in sorted(gw.exits):
            add(gw.exits[v])
    add(weights.head)
    if None in params:
        raise InputError("weights without names cannot be optimized")
    return params


def owned_candidate(spec, net_layout, seed):
    """Candidate with fresh owned weights and the name -> Tensor map of them"""
    weights = init_owned_weights(net_layout, seed)
    return assemble(spec, weights, net_layout), weight_parameters(weights)