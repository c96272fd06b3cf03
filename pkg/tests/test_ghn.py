"""Tests for the graph hypernetwork: embeddings, propagation, generation"""
import numpy as np
import pytest

from ghnx.errors import ConfigError, ModeError
from ghnx.arch.graph import (
    STANDARD, OpKind, ArchNode, ArchGraph, topological_sort, relabel,
)
from ghnx.arch.network import stack_blocks, anytime_network, layout
from ghnx.arch.sampling import sample_block
from ghnx.ghn.model import GhnModel
from ghnx.ghn.propagation import (
    PropagationScheme, EmbeddingState, init_embeddings, step_synchronous,
    step_forward_backward, sweep_order, propagate, graph_embedding,
    propagate_stacked,
)
from ghnx.ghn.hypernet import (
    generate_group, generate_weights, generate_bottleneck_from_edges,
    tile_grid,
)
from ghnx.inputs.ghn import GhnConfig
from ghnx.tensor import Tensor, ops

from conftest import standard_block


def _single_node():
    return ArchGraph([ArchNode(0, OpKind.CONV1X1)], [], (0,), STANDARD)


def _same(a, b):
    return all(np.array_equal(a.h[v].data, b.h[v].data) for v in a.h)


class TestInitEmbeddings:

    def test_shared_rows(self, small_model):
        g = standard_block([OpKind.SEP_CONV3X3, OpKind.SEP_CONV3X3],
                           [(0, 2), (1, 3)])
        h = init_embeddings(g, small_model).h
        assert np.array_equal(h[2].data, h[3].data)
        assert np.array_equal(h[0].data, h[1].data)
        assert not np.array_equal(h[0].data, h[2].data)

    def test_zero_matrix(self, small_model, chain_block):
        small_model.params["embed"].data[...] = 0.0
        state = init_embeddings(chain_block, small_model)
        assert all(not np.any(t.data) for t in state.h.values())
        assert state.step == 0 and state.updates == 0

    def test_exit_flag(self, anytime_model, anytime_graph):
        nodes = list(anytime_graph.nodes)
        flipped = nodes[1]._replace(
            anytime=nodes[1].anytime._replace(early_exit=False))
        other = anytime_graph._replace(nodes=tuple(nodes[:1] + [flipped]
                                                   + nodes[2:]))
        a = init_embeddings(anytime_graph, anytime_model).h[1]
        b = init_embeddings(other, anytime_model).h[1]
        assert not np.array_equal(a.data, b.data)

    def test_mode_mismatch(self, small_model, anytime_graph):
        with pytest.raises(ConfigError, match="anytime graph"):
            init_embeddings(anytime_graph, small_model)


class TestSynchronous:

    def test_isolated_node(self, small_model):
        g = _single_node()
        state = init_embeddings(g, small_model)
        new = step_synchronous(g, state, small_model)
        expected = ops.gru_cell(state.h[0], Tensor(np.zeros(8)),
                                small_model.gru)
        assert np.array_equal(new.h[0].data, expected.data)
        assert new.updates == 1

    def test_chain_direction(self, small_model):
        g = standard_block([OpKind.CONV1X1], [(0, 2)])
        state = init_embeddings(g, small_model)
        base = step_synchronous(g, state, small_model)

        h = dict(state.h)
        h[2] = ops.add(h[2], 1.0)
        moved_b = step_synchronous(g, state._replace(h=h), small_model)
        assert np.array_equal(moved_b.h[0].data, base.h[0].data)

        h = dict(state.h)
        h[0] = ops.add(h[0], 1.0)
        moved_a = step_synchronous(g, state._replace(h=h), small_model)
        assert not np.array_equal(moved_a.h[2].data, base.h[2].data)

    def test_zero_steps(self, small_model, chain_block):
        init = init_embeddings(chain_block, small_model)
        out = propagate(chain_block, small_model,
                        PropagationScheme.synchronous(0))
        assert _same(init, out)


class TestForwardBackward:

    def test_single_node_count(self, small_model):
        g = _single_node()
        state = step_forward_backward(g, init_embeddings(g, small_model),
                                      small_model)
        assert state.updates == 1

    def test_seven_node_count(self, small_model):
        g = sample_block(STANDARD, 5, 3)
        assert len(g.nodes) == 7
        state = propagate(g, small_model, PropagationScheme.forward_backward(1))
        assert state.updates == 13
        assert len(sweep_order(g)) == 13

    def test_passes(self, small_model, chain_block):
        state = propagate(chain_block, small_model,
                          PropagationScheme.forward_backward(3))
        assert state.step == 3
        assert state.updates == 3 * (2 * len(chain_block.nodes) - 1)

    def test_schemes_agree_on_single_node(self, small_model):
        g = _single_node()
        a = propagate(g, small_model, PropagationScheme.synchronous(2))
        b = propagate(g, small_model, PropagationScheme.forward_backward(2))
        assert _same(a, b)

    def test_default_scheme(self):
        assert PropagationScheme.forward_backward() == \
            PropagationScheme("forward-backward", 5)
        assert GhnConfig().propagation == PropagationScheme.forward_backward()

    def test_bad_scheme(self):
        with pytest.raises(ConfigError):
            PropagationScheme("random", 1)


class TestEquivariance:

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_forward_backward(self, small_model, seed):
        g = sample_block(STANDARD, 3, seed)
        perm = np.random.default_rng(seed).permutation(len(g.nodes))
        mapping = {v: int(perm[i]) for i, v in enumerate(g.node_ids)}
        gp = relabel(g, mapping)
        scheme = PropagationScheme.forward_backward(2)

        order = [mapping[v] for v in topological_sort(g)]
        a = propagate(g, small_model, scheme)
        b = propagate(gp, small_model, scheme, order=order)
        for v in g.node_ids:
            assert np.array_equal(a.h[v].data, b.h[mapping[v]].data)

    def test_synchronous(self, small_model):
        g = sample_block(STANDARD, 3, 7)
        mapping = {v: (v * 3 + 1) % len(g.nodes) for v in g.node_ids}
        gp = relabel(g, mapping)
        scheme = PropagationScheme.synchronous(3)
        a = propagate(g, small_model, scheme)
        b = propagate(gp, small_model, scheme)
        for v in g.node_ids:
            assert np.array_equal(a.h[v].data, b.h[mapping[v]].data)
        assert np.array_equal(graph_embedding(a).data,
                              graph_embedding(b).data)


class TestGraphEmbedding:

    def test_mean(self):
        state = EmbeddingState({0: Tensor([1.0, 0.0]), 1: Tensor([0.0, 1.0])},
                               0, 0)
        assert np.array_equal(graph_embedding(state).data, [0.5, 0.5])

    def test_equal_nodes(self):
        v = [0.25, -1.0, 3.0]
        state = EmbeddingState({i: Tensor(v) for i in range(4)}, 0, 0)
        assert np.allclose(graph_embedding(state).data, v)


class TestStacked:

    def test_one_block(self, small_model, chain_block, fb1):
        a = propagate_stacked([chain_block], small_model, fb1)[0]
        b = propagate(chain_block, small_model, fb1)
        assert _same(a, b)

    def test_passing_toggle(self, small_model, two_leaf_block, fb1):
        blocks = [two_leaf_block, two_leaf_block]
        off = propagate_stacked(blocks, small_model, fb1,
                                pass_embeddings=False)
        assert _same(off[0], off[1])
        on = propagate_stacked(blocks, small_model, fb1)
        assert not _same(on[0], on[1])
        assert _same(on[0], off[0])

    def test_first_step_delivery(self, small_model, two_leaf_block):
        blocks = [two_leaf_block, two_leaf_block]
        scheme = PropagationScheme.forward_backward(2)
        every = propagate_stacked(blocks, small_model, scheme)
        first = propagate_stacked(blocks, small_model, scheme,
                                  delivery="first-step")
        assert _same(every[0], first[0])
        assert not _same(every[1], first[1])

    def test_model_count(self, small_dims, chain_block, fb1):
        models = [GhnModel(small_dims, seed=i) for i in range(3)]
        with pytest.raises(ConfigError):
            propagate_stacked([chain_block] * 2, models, fb1)


class TestGenerate:

    def test_kernel_slicing(self, small_model):
        h = Tensor(np.linspace(-1, 1, 8))
        (big,) = [w.tensor for w in
                  generate_group(small_model, h, [("conv", (4, 4, 7, 7))])]
        (small,) = [w.tensor for w in
                    generate_group(small_model, h, [("conv", (4, 4, 3, 3))])]
        assert np.array_equal(small.data, big.data[:, :, 2:5, 2:5])

    def test_no_parameters(self, small_model):
        assert generate_group(small_model, Tensor(np.ones(8)), []) == []

    def test_tiled_shapes(self, small_model):
        h = Tensor(np.ones(8))
        shapes = [("depthwise", (10, 1, 5, 5)), ("pointwise", (6, 10, 1, 1)),
                  ("scale", (6,)), ("bias", (6,))]
        out = generate_group(small_model, h, shapes)
        assert [w.role for w in out] == ["depthwise", "pointwise", "scale",
                                         "bias"]
        assert [w.tensor.shape for w in out] == [s for _, s in shapes]

    def test_tiles_differ(self, small_model):
        h = Tensor(np.linspace(0, 1, 8))
        (w,) = generate_group(small_model, h, [("conv", (8, 4, 1, 1))])
        assert not np.array_equal(w.tensor.data[:4], w.tensor.data[4:])

    def test_affine_offset(self, small_model):
        small_model.params["hyper.w2"].data[...] = 0.0
        out = generate_group(small_model, Tensor(np.ones(8)),
                             [("conv", (4, 4, 1, 1)), ("scale", (4,)),
                              ("bias", (4,))])
        assert np.array_equal(out[1].tensor.data, np.ones(4))
        assert np.array_equal(out[2].tensor.data, np.zeros(4))

    def test_unrepresentable(self, small_dims):
        with pytest.raises(ConfigError):
            tile_grid((40, 4, 3, 3), small_dims)

    def test_identical_embeddings(self, small_model):
        h = Tensor(np.arange(8.0))
        a = generate_group(small_model, h, [("conv", (4, 4, 3, 3))])
        b = generate_group(small_model, Tensor(np.arange(8.0)),
                           [("conv", (4, 4, 3, 3))])
        assert np.array_equal(a[0].tensor.data, b[0].tensor.data)

    def test_block_weights(self, small_model, two_leaf_block, fb1):
        spec = stack_blocks(two_leaf_block, 1, (), 4)
        lay = layout(spec, (1, 8, 8), 3)
        state = propagate(two_leaf_block, small_model, fb1)
        gw = generate_weights(two_leaf_block, state, small_model,
                              lay.blocks[0])
        assert gw.nodes[3] == []
        assert [w.role for w in gw.nodes[2]] == ["conv", "scale", "bias"]
        again = generate_weights(two_leaf_block, state, small_model,
                                 lay.blocks[0])
        assert np.array_equal(gw.nodes[0][0].tensor.data,
                              again.nodes[0][0].tensor.data)


class TestEdgeBottleneck:

    def test_widths(self, anytime_model, anytime_graph, fb1):
        state = propagate(anytime_graph, anytime_model, fb1)
        both = generate_bottleneck_from_edges(
            anytime_graph, state, anytime_model, [(0, 2), (1, 2)], 4, 4)
        assert both.shape == (4, 8, 1, 1)
        single = generate_bottleneck_from_edges(
            anytime_graph, state, anytime_model, [(0, 2)], 4, 4)
        assert np.array_equal(both.data[:, :4], single.data)

    def test_standard_graph(self, small_model, anytime_model, chain_block,
                            fb1):
        state = propagate(chain_block, small_model, fb1)
        with pytest.raises(ModeError):
            generate_bottleneck_from_edges(chain_block, state, anytime_model,
                                           [(0, 2)], 4, 4)

    def test_mixed_targets(self, anytime_model, anytime_graph, fb1):
        state = propagate(anytime_graph, anytime_model, fb1)
        with pytest.raises(ModeError):
            generate_bottleneck_from_edges(
                anytime_graph, state, anytime_model, [(0, 1), (0, 2)], 4, 4)

    def test_exit_classifiers(self, anytime_model, anytime_graph, fb1):
        lay = layout(anytime_network(anytime_graph, 4), (1, 8, 8), 3)
        state = propagate(anytime_graph, anytime_model, fb1)
        gw = generate_weights(anytime_graph, state, anytime_model,
                              lay.blocks[0], num_classes=3)
        assert set(gw.exits) == {1}
        assert [w.tensor.shape for w in gw.exits[1]] == [(3, 4), (3,)]
        assert gw.bottlenecks[2].shape == (4, 8, 1, 1)
        assert 0 not in gw.bottlenecks
