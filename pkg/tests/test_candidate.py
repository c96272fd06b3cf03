"""Tests for candidate assembly, loss, GHN training and evaluation"""
import math

import numpy as np
import pytest

from ghnx.errors import AssemblyError, NumericError, TrainingError
from ghnx.arch.graph import ANYTIME, OpKind
from ghnx.arch.network import stack_blocks, anytime_network, layout
from ghnx.arch.serialize import serialize
from ghnx.candidate.network import (
    GhnSetup, MacroConfig, build_setup, assemble, apply_op, forward_loss,
    generate_candidate, init_owned_weights, owned_candidate,
    SHARED_PASSING, PASSING_ONLY, INDEPENDENT,
)
from ghnx.candidate.evaluate import eval_with_generated
from ghnx.candidate.training import (
    GhnTrainConfig, GhnTrainer, ghn_parameters, ghn_train_step,
    sgd_train_candidate,
)
from ghnx.ghn.model import GhnModel
from ghnx.tensor import Tensor, ops, conv
from ghnx.tensor.gradcheck import gradient_error
from ghnx.tensor.optim import init_adam

from conftest import standard_block


@pytest.fixture
def setup(small_model, fb1):
    return GhnSetup(small_model, fb1)


@pytest.fixture
def batch(tiny_data):
    return tiny_data[0].batch(np.arange(4))


def _owned(g, repeat=1, channels=4, classes=4):
    spec = stack_blocks(g, repeat, (), channels)
    lay = layout(spec, (1, 8, 8), classes)
    net, params = owned_candidate(spec, lay, 0)
    return net, params


class TestAssemble:

    def test_identity_node(self, batch):
        g = standard_block([OpKind.IDENTITY], [(0, 2)])
        net, _ = _owned(g)
        x = conv.channel_affine(
            conv.conv2d(batch.images, net.stem["stem"], padding=1),
            net.stem["scale"], net.stem["bias"])
        y = apply_op(OpKind.CONV1X1, x, net.blocks[0][0][0])
        expected = ops.linear(conv.global_avg_pool(y),
                              net.head["classifier"],
                              net.head["classifier_bias"])
        assert np.allclose(net(batch.images).logits.data, expected.data)

    def test_sum_node(self, batch):
        g = standard_block([OpKind.CONV1X1, OpKind.CONV1X1, OpKind.IDENTITY],
                           [(0, 2), (0, 3), (2, 4), (3, 4)])
        net, _ = _owned(g)
        nodes = net.blocks[0][0]
        x = conv.channel_affine(
            conv.conv2d(batch.images, net.stem["stem"], padding=1),
            net.stem["scale"], net.stem["bias"])
        y0 = apply_op(OpKind.CONV1X1, x, nodes[0])
        y = ops.add(apply_op(OpKind.CONV1X1, y0, nodes[2]),
                    apply_op(OpKind.CONV1X1, y0, nodes[3]))
        expected = ops.linear(conv.global_avg_pool(y),
                              net.head["classifier"],
                              net.head["classifier_bias"])
        assert np.allclose(net(batch.images).logits.data, expected.data)

    def test_missing_bundle(self, two_leaf_block):
        spec = stack_blocks(two_leaf_block, 1, (), 4)
        lay = layout(spec, (1, 8, 8), 4)
        weights = init_owned_weights(lay, 0)
        del weights.blocks[0].nodes[2]
        with pytest.raises(AssemblyError) as e:
            assemble(spec, weights, lay)
        assert e.value.node == 2

    def test_wrong_image_shape(self, two_leaf_block):
        net, _ = _owned(two_leaf_block)
        with pytest.raises(ValueError):
            net(Tensor(np.zeros((2, 3, 8, 8))))

    def test_anytime_scales(self, anytime_graph, batch):
        spec = anytime_network(anytime_graph, 4)
        lay = layout(spec, (1, 8, 8), 4)
        net, _ = owned_candidate(spec, lay, 0)
        out = net(batch.images)
        assert [v for v, _ in out.exits] == [1]
        assert out.exits[0][1].shape == (4, 4)
        assert out.logits.shape == (4, 4)

    def test_pure(self, two_leaf_block, batch):
        net, _ = _owned(two_leaf_block, repeat=2)
        a = net(batch.images).logits.data
        b = net(batch.images).logits.data
        assert np.array_equal(a, b)


class TestForwardLoss:

    def test_uniform_head(self, two_leaf_block, batch):
        net, _ = _owned(two_leaf_block)
        net.head["classifier"].data[...] = 0.0
        loss = forward_loss(net, batch)
        assert loss.total.item() == pytest.approx(math.log(4))
        assert [k for k, _ in loss.parts] == ["head"]

    def test_anytime_mean(self, anytime_graph, batch):
        spec = anytime_network(anytime_graph, 4)
        net, _ = owned_candidate(spec, layout(spec, (1, 8, 8), 4), 0)
        loss = forward_loss(net, batch)
        parts = [p.item() for _, p in loss.parts]
        assert len(parts) == 2
        assert loss.total.item() == pytest.approx(np.mean(parts))


class TestGenerated:

    def test_deterministic(self, setup, two_leaf_block, batch):
        spec = stack_blocks(two_leaf_block, 2, (), 4)
        lay = layout(spec, (1, 8, 8), 4)
        a = generate_candidate(setup, spec, lay)(batch.images).logits.data
        b = generate_candidate(setup, spec, lay)(batch.images).logits.data
        assert np.array_equal(a, b)

    def test_end_to_end_gradients(self, setup, small_model, batch):
        g = standard_block([OpKind.SEP_CONV3X3, OpKind.CONV1X1],
                           [(0, 2), (1, 2), (2, 3)])
        spec = stack_blocks(g, 2, (), 4)
        lay = layout(spec, (1, 8, 8), 4)
        names = ["msg.b2", "gru.b_z", "hyper.b1"]

        def fn(*_):
            return forward_loss(generate_candidate(setup, spec, lay),
                                batch).total

        inputs = [small_model.params[k] for k in names]
        assert gradient_error(fn, inputs) < 1e-4

    def test_anytime_gradients(self, anytime_model, anytime_graph, fb1,
                               batch):
        setup = GhnSetup(anytime_model, fb1)
        spec = anytime_network(anytime_graph, 4)
        lay = layout(spec, (1, 8, 8), 4)

        def fn(*_):
            return forward_loss(generate_candidate(setup, spec, lay),
                                batch).total

        inputs = [anytime_model.params[k] for k in ("edge.b2", "msg.b2")]
        assert gradient_error(fn, inputs) < 1e-4

    def test_non_finite_embedding(self, setup, small_model, chain_block):
        small_model.params["gru.b_h"].data[0] = np.nan
        spec = stack_blocks(chain_block, 1, (), 4)
        with pytest.raises(NumericError):
            generate_candidate(setup, spec, layout(spec, (1, 8, 8), 4))


class TestTrainStep:

    def _spec(self, g):
        spec = stack_blocks(g, 2, (), 4)
        return spec, layout(spec, (1, 8, 8), 4)

    def test_zero_lr(self, setup, small_model, two_leaf_block, batch):
        spec, lay = self._spec(two_leaf_block)
        before = small_model.state_dict()
        params = ghn_parameters(small_model)
        loss, state = ghn_train_step(setup, spec, lay, batch,
                                     init_adam(params), 0.0)
        assert math.isfinite(loss)
        assert state.step == 1
        after = small_model.state_dict()
        assert all(np.array_equal(before[k], after[k]) for k in before)

    def test_update(self, setup, small_model, two_leaf_block, batch):
        spec, lay = self._spec(two_leaf_block)
        before = small_model.state_dict()
        params = ghn_parameters(small_model)
        ghn_train_step(setup, spec, lay, batch, init_adam(params), 1e-3)
        after = small_model.state_dict()
        assert not np.array_equal(before["hyper.b2"], after["hyper.b2"])
        assert all(t.grad is None for t in params.values())

    def test_non_finite_loss(self, setup, small_model, two_leaf_block,
                             batch):
        spec, lay = self._spec(two_leaf_block)
        small_model.params["hyper.b2"].data[...] = np.inf
        params = ghn_parameters(small_model)
        with pytest.raises(TrainingError) as e:
            ghn_train_step(setup, spec, lay, batch, init_adam(params), 1e-3)
        assert e.value.graph_json == serialize(two_leaf_block)


class TestTrainer:

    def _trainer(self, small_dims, fb1, data, steps=3, seed=0):
        config = GhnTrainConfig(steps=steps, batch_size=4, max_nodes=2,
                                random_nodes=True, seed=seed)
        setup = GhnSetup(GhnModel(small_dims, seed=0), fb1)
        return GhnTrainer(setup, "standard", MacroConfig(2, (), 4), data,
                          config)

    def test_same_seed(self, small_dims, fb1, tiny_data):
        a = self._trainer(small_dims, fb1, tiny_data[0]).run(log_every=0)
        b = self._trainer(small_dims, fb1, tiny_data[0]).run(log_every=0)
        sa, sb = a.state_tensors(), b.state_tensors()
        assert all(np.array_equal(sa[k], sb[k]) for k in sa)

    def test_resume(self, small_dims, fb1, tiny_data):
        full = self._trainer(small_dims, fb1, tiny_data[0]).run(log_every=0)

        part = self._trainer(small_dims, fb1, tiny_data[0])
        part.run(until=1, log_every=0)
        resumed = self._trainer(small_dims, fb1, tiny_data[0])
        resumed.restore(part.state_tensors(), part.state())
        assert resumed.step == 1
        resumed.run(log_every=0)

        sa, sb = full.state_tensors(), resumed.state_tensors()
        assert set(sa) == set(sb)
        assert all(np.array_equal(sa[k], sb[k]) for k in sa)

    def test_records(self, small_dims, fb1, tiny_data):
        records, checkpoints = [], []
        trainer = self._trainer(small_dims, fb1, tiny_data[0], steps=4)
        trainer.run(on_record=records.append,
                    on_checkpoint=lambda t: checkpoints.append(t.step),
                    checkpoint_every=2, log_every=0)
        assert [r.step for r in records] == [0, 1, 2, 3]
        assert all(1 <= r.nodes <= 2 for r in records)
        assert checkpoints == [2, 4]

    def test_anytime_graphs(self, anytime_model, fb1, tiny_data):
        config = GhnTrainConfig(steps=1, batch_size=4, max_nodes=3,
                                n_exits=2)
        trainer = GhnTrainer(GhnSetup(anytime_model, fb1), ANYTIME,
                             MacroConfig(1, (), 4), tiny_data[0], config)
        g = trainer.sample_graph(0)
        assert g.mode == ANYTIME and len(g.exit_ids) == 2
        rec = trainer.train_step()
        assert math.isfinite(rec.loss)


class TestSetups:

    def test_variants(self, small_dims, fb1):
        shared = build_setup(small_dims, fb1, 0, SHARED_PASSING, repeat=3)
        assert isinstance(shared.models, GhnModel) and shared.pass_embeddings
        pe = build_setup(small_dims, fb1, 0, PASSING_ONLY, repeat=3)
        assert len(pe.models) == 3 and pe.pass_embeddings
        ind = build_setup(small_dims, fb1, 0, INDEPENDENT, repeat=3)
        assert len(ind.models) == 3 and not ind.pass_embeddings
        assert len(ghn_parameters(pe.models)) == \
            3 * len(ghn_parameters(shared.models))

    def test_per_position_models(self, small_dims, fb1, two_leaf_block,
                                 batch):
        setup = build_setup(small_dims, fb1, 0, PASSING_ONLY, repeat=2)
        spec = stack_blocks(two_leaf_block, 2, (), 4)
        net = generate_candidate(setup, spec, layout(spec, (1, 8, 8), 4))
        assert net(batch.images).logits.shape == (4, 4)


class TestEvaluate:

    def test_generated_accuracy(self, setup, two_leaf_block, tiny_data):
        val = tiny_data[1]
        macro = MacroConfig(2, (), 4)
        a = eval_with_generated(setup, two_leaf_block, val, macro, 5)
        b = eval_with_generated(setup, two_leaf_block, val, macro, 16)
        assert 0.0 <= a.accuracy <= 1.0
        assert a.accuracy == b.accuracy
        assert a.points == [(a.flops, a.accuracy)]

    def test_anytime_points(self, anytime_model, anytime_graph, fb1,
                            tiny_data):
        setup = GhnSetup(anytime_model, fb1)
        res = eval_with_generated(setup, anytime_graph, tiny_data[1],
                                  MacroConfig(1, (), 4))
        assert len(res.points) == 2
        assert res.points[-1][0] == res.flops
        assert res.points[0][0] < res.flops

    def test_sgd_zero_steps(self, two_leaf_block, tiny_data):
        train, val = tiny_data
        macro = MacroConfig(1, (), 4)
        a = sgd_train_candidate(two_leaf_block, train, val, 0, 0, macro)
        b = sgd_train_candidate(two_leaf_block, train, val, 0, 0, macro)
        assert 0.0 <= a <= 1.0 and a == b

    @pytest.mark.slow
    def test_sgd_training(self, two_leaf_block, tiny_data):
        train, val = tiny_data
        macro = MacroConfig(1, (), 4)
        a = sgd_train_candidate(two_leaf_block, train, val, 20, 0, macro,
                                lr=1e-2, batch_size=8)
        b = sgd_train_candidate(two_leaf_block, train, val, 20, 0, macro,
                                lr=1e-2, batch_size=8)
        assert a == b
