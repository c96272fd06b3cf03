"""GHN training and ground-truth candidate training

A GHN step samples a fresh block graph, generates all of its weights, runs
the candidate on a batch and backpropagates the loss through the candidate,
through H and through the unrolled message passing into every GHN parameter,
then applies one Adam step.

Every step draws its graph and batch from its own random stream, keyed by
(seed, stream, step), so a run resumed from a checkpoint repeats the same
steps as an uninterrupted one.
"""
from collections import namedtuple
import logging
import math

import numpy as np

from ..errors import CheckpointError, InputError, TrainingError
from ..arch.graph import ANYTIME
from ..arch.network import layout
from ..arch.sampling import sample_block, random_block_sizes
from ..arch.serialize import serialize
from ..ghn.model import GhnModel
from ..tensor import Tape
from ..tensor.optim import init_adam, adam_step, step_decay, AdamState
from ..utils import rng as stream_rng
from .evaluate import accuracies
from .network import (
    network_for, generate_candidate, forward_loss, owned_candidate,
)


logger = logging.getLogger(__name__)


_GhnTrainConfig = namedtuple(
    "_GhnTrainConfig",
    ["steps", "batch_size", "lr", "milestones", "gamma", "max_nodes",
     "random_nodes", "n_exits", "seed"],
    defaults=[200, 64, 1e-3, (0.5, 0.75), 0.5, 7, False, 1, 0]
)


class GhnTrainConfig(_GhnTrainConfig):
    """GHN training schedule

    Parameters
    ----------
    steps: int
       number of GHN steps (one graph and one batch each)
    batch_size: int, default 64
       images per step
    lr: float, default 1e-3
       initial Adam learning rate
    milestones: tuple of float, default (0.5, 0.75)
       fractions of `steps` at which the learning rate is multiplied by
       `gamma`
    gamma: float, default 0.5
       learning-rate decay factor
    max_nodes: int, default 7
       operator nodes of the training graphs
    random_nodes: bool, default False
       draw the node count of each graph uniformly from [1, max_nodes]; in
       the anytime space each block draws from [1, ceil(max_nodes / 3)]
    n_exits: int, default 1
       anytime only: exit nodes of the training graphs
    seed: int, default 0
       run seed
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.steps < 0:
            raise InputError(f"training steps must be >= 0, got {self.steps}")
        if self.batch_size < 1:
            raise InputError(f"batch size must be >= 1, got {self.batch_size}")
        if not self.lr > 0:
            raise InputError(f"learning rate must be positive, got {self.lr}")
        if self.max_nodes < 1:
            raise InputError(f"max_nodes must be >= 1, got {self.max_nodes}")


TrainRecord = namedtuple("TrainRecord", ["step", "loss", "lr", "nodes"])
TrainRecord.__doc__ = """One logged GHN step

Parameters
----------
step: int
   0-based step index
loss: float
   training loss of the step
lr: float
   learning rate used
nodes: int
   operator nodes of the sampled graph
"""


def ghn_parameters(models):
    """name -> Tensor over one shared model or a list of per-block models"""
    if isinstance(models, GhnModel):
        return dict(models.params)
    if len(models) == 1:
        return dict(models[0].params)
    return {
        f"{i}.{name}": t
        for i, m in enumerate(models) for name, t in m.params.items()
    }


def restore_models(models, tensors):
    """Load the "model/" tensors of a checkpoint into GHN models"""
    for k, t in ghn_parameters(models).items():
        name = f"model/{k}"
        if name not in tensors:
            raise CheckpointError(f"checkpoint has no tensor {name}")
        value = np.asarray(tensors[name], dtype=np.float64)
        if value.shape != t.shape:
            emsg = f"checkpoint tensor {k} has shape {value.shape}, model {t.shape}"
            raise CheckpointError(emsg)
        t.data[...] = value
    return models


def ghn_train_step(setup, spec, net_layout, batch, opt_state, lr):
    """One end-to-end GHN update

    Parameters
    ----------
    setup: candidate.network.GhnSetup
       models to train and how they embed networks
    spec: NetworkSpec
       network built from the sampled graph
    net_layout: arch.network.NetworkLayout
       shapes of `spec` for the batch images
    batch: candidate.network.Batch
       training batch
    opt_state: AdamState
       Adam buffers of `ghn_parameters(setup.models)`
    lr: float
       learning rate (zero leaves the models unchanged)

    Returns
    -------
    loss: float
       loss before the update
    opt_state: AdamState
       updated buffers

    Raises
    ------
    TrainingError
       if the loss is not finite; carries the graph serialization
    """
    params = ghn_parameters(setup.models)
    for t in params.values():
        t.zero_grad()
    with Tape() as tape:
        net = generate_candidate(setup, spec, net_layout)
        loss = forward_loss(net, batch).total
        value = loss.item()
        if not math.isfinite(value):
            raise TrainingError(
                f"non-finite training loss {value}",
                graph_json=serialize(spec.block)
            )
        tape.backward(loss)
    grads = {k: t.grad for k, t in params.items()}
    _, opt_state = adam_step(params, grads, opt_state, lr)
    for t in params.values():
        t.zero_grad()
    return value, opt_state


class GhnTrainer:
    """Trains a GHN on a dataset

    Parameters
    ----------
    setup: candidate.network.GhnSetup
       models to train and how they embed networks
    mode: {"standard", "anytime"}
       search space of the training graphs
    macro: candidate.network.MacroConfig
       network built from each graph (no reductions during training)
    train: loaders.dataset.Dataset
       training split
    config: GhnTrainConfig
       schedule
    """

    def __init__(self, setup, mode, macro, train, config):
        self.setup = setup
        self.mode = mode
        self.macro = macro
        self.train = train
        self.config = config
        self.params = ghn_parameters(setup.models)
        self.opt_state = init_adam(self.params)
        self.step = 0

    def sample_graph(self, step):
        """Training graph of a step"""
        cfg = self.config
        r = stream_rng(cfg.seed, "ghn-graph", step)
        if self.mode == ANYTIME:
            if cfg.random_nodes:
                sizes = random_block_sizes(math.ceil(cfg.max_nodes / 3), r)
            else:
                sizes = cfg.max_nodes
            total = sum(sizes) if isinstance(sizes, tuple) else sizes
            return sample_block(self.mode, sizes, r,
                                n_exits=min(cfg.n_exits, total))
        n = int(r.integers(1, cfg.max_nodes + 1)) if cfg.random_nodes \
            else cfg.max_nodes
        return sample_block(self.mode, n, r)

    def sample_batch(self, step):
        cfg = self.config
        r = stream_rng(cfg.seed, "ghn-batch", step)
        n = len(self.train)
        idx = r.choice(n, size=cfg.batch_size, replace=cfg.batch_size > n)
        return self.train.batch(idx)

    def lr_at(self, step):
        cfg = self.config
        return step_decay(step, cfg.steps, cfg.lr, cfg.milestones, cfg.gamma)

    def train_step(self):
        """Run the next step and return its record"""
        step = self.step
        g = self.sample_graph(step)
        batch = self.sample_batch(step)
        lr = self.lr_at(step)
        spec = network_for(g, self.macro)
        lay = layout(spec, self.train.image_shape, self.train.num_classes)
        loss, self.opt_state = ghn_train_step(
            self.setup, spec, lay, batch, self.opt_state, lr
        )
        self.step = step + 1
        return TrainRecord(step, loss, lr, len(g.op_ids))

    def run(self, until=None, on_record=None, on_checkpoint=None,
            checkpoint_every=0, log_every=10):
        """Train up to step `until` (default: the configured number)

        Parameters
        ----------
        until: int, optional
           stop once this many steps are complete
        on_record: callable, optional
           called with every TrainRecord
        on_checkpoint: callable, optional
           called with the trainer every `checkpoint_every` steps and at the
           end
        checkpoint_every: int
           checkpoint cadence in steps (0: only at the end)
        log_every: int
           cadence of INFO log lines
        """
        until = self.config.steps if until is None else min(until,
                                                             self.config.steps)
        while self.step < until:
            rec = self.train_step()
            if on_record is not None:
                on_record(rec)
            if log_every and (rec.step % log_every == 0 or
                              self.step == until):
                logger.info(
                    "step %d/%d loss %.4f lr %.2e nodes %d",
                    rec.step + 1, self.config.steps, rec.loss, rec.lr,
                    rec.nodes
                )
            if on_checkpoint is not None and checkpoint_every and \
               self.step % checkpoint_every == 0 and self.step < until:
                on_checkpoint(self)
        if on_checkpoint is not None:
            on_checkpoint(self)
        return self

    # Checkpoint state

    def state_tensors(self):
        """name -> array for the model and the Adam moments"""
        tensors = {}
        for k, t in self.params.items():
            tensors[f"model/{k}"] = t.data.copy()
            tensors[f"adam.m/{k}"] = self.opt_state.m[k].copy()
            tensors[f"adam.v/{k}"] = self.opt_state.v[k].copy()
        return tensors

    def state(self):
        return {"step": self.step, "adam_step": self.opt_state.step}

    def restore(self, tensors, state):
        """Load what `state_tensors` and `state` produced"""
        for key in ("step", "adam_step"):
            if key not in state:
                raise CheckpointError(f"checkpoint state has no {key!r}")
        restore_models(self.setup.models, tensors)
        m, v = {}, {}
        for k in self.params:
            for prefix in ("adam.m/", "adam.v/"):
                if prefix + k not in tensors:
                    raise CheckpointError(f"checkpoint has no tensor {prefix}{k}")
            m[k] = np.array(tensors[f"adam.m/{k}"], dtype=np.float64)
            v[k] = np.array(tensors[f"adam.v/{k}"], dtype=np.float64)
        self.opt_state = AdamState(int(state["adam_step"]), m, v)
        self.step = int(state["step"])


def sgd_train_candidate(g, train, val, steps, seed, macro, lr=1e-3,
                        batch_size=64, eval_batch=250):
    """Ground-truth accuracy: train a candidate from scratch with Adam

    Parameters
    ----------
    g: ArchGraph
       candidate block graph
    train, val: loaders.dataset.Dataset
       training and validation splits
    steps: int
       Adam steps (0 evaluates the initialization)
    seed: int
       seed of the initialization and batch streams
    macro: candidate.network.MacroConfig
       how the block becomes a network
    lr: float
       learning rate
    batch_size: int
       images per step

    Returns
    -------
    float
       validation accuracy of the final head
    """
    spec = network_for(g, macro)
    lay = layout(spec, train.image_shape, train.num_classes)
    net, params = owned_candidate(spec, lay, stream_rng(seed, "sgd-init"))
    state = init_adam(params)
    n = len(train)
    for step in range(steps):
        r = stream_rng(seed, "sgd-batch", step)
        batch = train.batch(r.choice(n, size=batch_size, replace=batch_size > n))
        for t in params.values():
            t.zero_grad()
        with Tape() as tape:
            loss = forward_loss(net, batch).total
            if not math.isfinite(loss.item()):
                raise TrainingError(
                    f"non-finite loss while training a candidate at step {step}",
                    graph_json=serialize(g)
                )
            tape.backward(loss)
        grads = {k: t.grad for k, t in params.items()}
        _, state = adam_step(params, grads, state, lr)
    return accuracies(net, val, eval_batch)["head"]
