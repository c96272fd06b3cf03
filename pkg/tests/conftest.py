"""Shared fixtures for the ghnx tests"""
import numpy as np
import pytest

from ghnx.arch.graph import (
    STANDARD, ANYTIME, OpKind, Scale, AnytimeAttrs, ArchNode, ArchGraph,
)
from ghnx.candidate.network import MacroConfig
from ghnx.ghn.model import GhnModel, ModelDims
from ghnx.ghn.propagation import PropagationScheme
from ghnx.loaders.dataset import generate_gratings


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: trains candidates or GHNs for many steps"
    )


def standard_block(ops, edges):
    """Standard block with inputs 0 and 1 and op nodes 2, 3, ..."""
    nodes = [ArchNode(0, OpKind.CONV1X1), ArchNode(1, OpKind.CONV1X1)]
    nodes += [ArchNode(i + 2, op) for i, op in enumerate(ops)]
    return ArchGraph(nodes, edges, (0, 1), STANDARD)


def anytime_node(i, op, scale=Scale.FULL, exit_=False, block=1):
    return ArchNode(i, op, AnytimeAttrs(scale, exit_, block))


@pytest.fixture
def chain_block():
    """0 -> 2 -> 3 -> 4, input 1 unused"""
    return standard_block(
        [OpKind.SEP_CONV3X3, OpKind.CONV1X1, OpKind.MAX_POOL3X3],
        [(0, 2), (2, 3), (3, 4)]
    )


@pytest.fixture
def two_leaf_block():
    """Both inputs feed a conv; the conv and a pooling node are leaves"""
    return standard_block(
        [OpKind.CONV1X1, OpKind.AVG_POOL3X3],
        [(0, 2), (1, 2), (1, 3)]
    )


@pytest.fixture
def anytime_graph():
    return ArchGraph(
        [
            anytime_node(0, OpKind.CONV1X1),
            anytime_node(1, OpKind.CONV3X3, Scale.HALF, True, 1),
            anytime_node(2, OpKind.CONV1X1, Scale.QUARTER, False, 2),
            anytime_node(3, OpKind.AVG_POOL3X3, Scale.QUARTER, False, 3),
        ],
        [(0, 1), (0, 2), (1, 2), (2, 3)],
        (0,), ANYTIME
    )


@pytest.fixture
def small_dims():
    return ModelDims(STANDARD, hidden=8, hyper_hidden=16, slab_channels=4,
                     tile_bits=3)


@pytest.fixture
def small_model(small_dims):
    return GhnModel(small_dims, seed=0)


@pytest.fixture
def anytime_model():
    dims = ModelDims(ANYTIME, hidden=8, hyper_hidden=16, slab_channels=4,
                     tile_bits=3)
    return GhnModel(dims, seed=0)


@pytest.fixture
def fb1():
    return PropagationScheme.forward_backward(1)


@pytest.fixture
def tiny_macro():
    return MacroConfig(repeat=2, reductions=(), channels=4)


@pytest.fixture
def tiny_data():
    train = generate_gratings(24, num_classes=4, channels=1, size=8,
                              seed=np.random.SeedSequence(1))
    val = generate_gratings(16, num_classes=4, channels=1, size=8,
                            seed=np.random.SeedSequence(2))
    return train, val
