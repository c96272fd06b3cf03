"""Graph hypernetwork: parameters, message passing and weight generation"""
from .model import GhnModel, ModelDims, ROLES
from .propagation import (
    PropagationScheme, EmbeddingState, SYNCHRONOUS, FORWARD_BACKWARD,
    init_embeddings, step_synchronous, step_forward_backward, sweep_order,
    propagate, graph_embedding, propagate_stacked,
)
from .hypernet import (
    Weight, GeneratedWeights, NetworkWeights, generate_group,
    generate_weights, generate_bottleneck_from_edges, generate_network_weights,
)
