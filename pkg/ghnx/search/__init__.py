"""Random search, correlation benchmarks and ablations"""
from .stats import pearson_r, pearson_p_value, anytime_auc
from .random_search import (
    Candidate, SearchReport, Comparison, random_search, compare_top_random,
    sample_candidates,
)
from .correlation import (
    Task, CorrelationReport, correlation_benchmark, sgd_surrogate, sgd_truth,
)
from .ablation import Experiment, AblationRow, ablate, AXES
