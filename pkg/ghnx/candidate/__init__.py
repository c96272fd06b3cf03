"""Candidate networks: assembly, training and evaluation"""
from .network import (
    Batch, Outputs, Loss, MacroConfig, GhnSetup, VARIANTS, build_setup,
    network_for, assemble, apply_op, CandidateNet, forward_loss,
    generate_candidate, init_owned_weights, owned_candidate,
)
from .training import (
    GhnTrainConfig, TrainRecord, GhnTrainer, ghn_parameters, ghn_train_step,
    restore_models, sgd_train_candidate,
)
from .evaluate import EvalResult, accuracies, accuracy_points, eval_with_generated
