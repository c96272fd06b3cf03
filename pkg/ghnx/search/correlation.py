"""Correlation of GHN-predicted and trained accuracy

A fixed set of fresh candidates is ranked twice: by a surrogate (by default
accuracy under GHN-generated weights) and by ground truth (accuracy after
training the candidate from scratch). The report holds Pearson's r on all
pairs and on the better half by true accuracy.
"""
from collections import namedtuple
import logging
import time

from ..errors import InputError, StatisticsError
from ..arch.flops import count_flops
from ..arch.serialize import graph_hash
from ..candidate.network import network_for
from ..candidate.evaluate import eval_with_generated
from ..candidate.training import sgd_train_candidate
from .random_search import sample_candidates, frozen, evaluate_candidates
from .stats import pearson_r, pearson_p_value


logger = logging.getLogger(__name__)


Task = namedtuple(
    "Task",
    ["mode", "train", "val", "macro", "nodes", "n_exits", "lr", "batch_size",
     "eval_batch"],
    defaults=[1, 1e-3, 64, 250]
)
Task.__doc__ = """What candidates are drawn from and trained on

Parameters
----------
mode: {"standard", "anytime"}
   search space
train, val: loaders.dataset.Dataset
   training and validation splits
macro: candidate.network.MacroConfig
   how each block becomes a network
nodes: int
   operator nodes per candidate
n_exits: int, default 1
   anytime only: exits per candidate
lr: float, default 1e-3
   ground-truth learning rate
batch_size: int, default 64
   ground-truth batch size
eval_batch: int, default 250
   evaluation batch size
"""


CorrelationReport = namedtuple(
    "CorrelationReport",
    ["pairs", "r_all", "r_top", "n", "p_value", "hashes", "baselines", "flops"]
)
CorrelationReport.__doc__ = """Surrogate against ground truth

Parameters
----------
pairs: list of (float, float)
   (predicted, true) accuracy per candidate, in sample order
r_all: float
   Pearson's r over all pairs
r_top: float or None
   Pearson's r over the n // 2 candidates with the highest true accuracy;
   None when fewer than two or when either side is constant
n: int
   number of candidates
p_value: float or None
   one-sided p-value of r_all > 0 (None for n < 3)
hashes: list of str
   graph hash per candidate
baselines: list of (str, float, float or None)
   (name, r_all, r_top) of each extra surrogate
flops: list of int
   FLOPs of the full forward pass per candidate
"""


class TruthCache:
    """Ground-truth accuracies keyed by graph hash and training budget"""

    def __init__(self):
        self.values = {}

    def get(self, g, steps, seed, compute):
        key = (graph_hash(g), int(steps), int(seed))
        if key not in self.values:
            self.values[key] = float(compute())
        return self.values[key]


def sgd_truth(task, steps, seed, cache=None):
    """Ground truth: validation accuracy after `steps` Adam steps"""
    cache = TruthCache() if cache is None else cache

    def truth(g):
        return cache.get(g, steps, seed, lambda: sgd_train_candidate(
            g, task.train, task.val, steps, seed, task.macro, lr=task.lr,
            batch_size=task.batch_size, eval_batch=task.eval_batch
        ))

    return truth


def sgd_surrogate(task, steps, seed, cache=None):
    """Baseline surrogate: accuracy after a short training run"""
    return sgd_truth(task, steps, seed, cache)


def ghn_predictor(setup, task):
    """Surrogate: validation accuracy under GHN-generated weights"""
    snap = frozen(setup)

    def predict(g):
        return eval_with_generated(
            snap, g, task.val, task.macro, task.eval_batch
        ).accuracy

    return predict


def top_half(pairs):
    """Pairs of the n // 2 highest true accuracies (stable on ties)"""
    order = sorted(range(len(pairs)), key=lambda i: (-pairs[i][1], i))
    return [pairs[i] for i in order[:len(pairs) // 2]]


def _r_top(pairs):
    top = top_half(pairs)
    if len(top) < 2:
        return None
    try:
        return pearson_r([p for p, _ in top], [t for _, t in top])
    except StatisticsError:
        logger.warning("top-half correlation undefined: constant accuracies")
        return None


def _flops(g, task):
    spec = network_for(g, task.macro)
    return count_flops(spec, task.val.image_shape, task.val.num_classes).total


def correlate_pairs(pairs):
    """(r_all, r_top) of (predicted, true) pairs"""
    r_all = pearson_r([p for p, _ in pairs], [t for _, t in pairs])
    return r_all, _r_top(pairs)


def correlation_benchmark(setup, n, truth_steps, seed, task, predictor=None,
                          truth=None, surrogates=None, threads=1):
    """Pearson correlation between a surrogate and trained accuracy

    Parameters
    ----------
    setup: candidate.network.GhnSetup
       trained GHN (unused when `predictor` is given)
    n: int
       number of fresh candidates
    truth_steps: int
       training steps of the ground truth
    seed: int
       run seed; candidates come from the "correlation" stream
    task: Task
       data and candidate shape
    predictor: callable, optional
       graph -> predicted accuracy, replacing the GHN surrogate
    truth: callable, optional
       graph -> true accuracy, replacing training from scratch
    surrogates: dict, optional
       name -> (graph -> accuracy) baselines correlated the same way
    threads: int
       workers for the GHN evaluations

    Returns
    -------
    CorrelationReport

    Raises
    ------
    StatisticsError
       if the predicted or the true accuracies are all equal
    """
    if n < 2:
        raise InputError(f"correlation needs at least 2 candidates, got {n}")
    graphs = sample_candidates(task.mode, n, seed, task.nodes, task.n_exits,
                               stream="correlation")
    t0 = time.perf_counter()
    if predictor is None:
        results = evaluate_candidates(setup, graphs, task.val, task.macro,
                                      threads, task.eval_batch)
        predicted = [r.accuracy for r in results]
    else:
        predicted = [float(predictor(g)) for g in graphs]
    t1 = time.perf_counter()
    logger.info("predicted %d candidates in %.2fs", n, t1 - t0)

    if truth is None:
        truth = sgd_truth(task, truth_steps, seed)
    true = [float(truth(g)) for g in graphs]
    t2 = time.perf_counter()
    logger.info("ground truth of %d candidates in %.2fs", n, t2 - t1)

    pairs = list(zip(predicted, true))
    r_all, r_top = correlate_pairs(pairs)
    p = pearson_p_value(r_all, n) if n >= 3 else None

    baselines = []
    for name in sorted(surrogates or {}):
        fn = surrogates[name]
        b_pairs = [(float(fn(g)), t) for g, t in zip(graphs, true)]
        try:
            b_all, b_top = correlate_pairs(b_pairs)
        except StatisticsError:
            logger.warning("baseline %s has constant predictions", name)
            b_all, b_top = None, None
        baselines.append((name, b_all, b_top))

    logger.info("correlation over %d candidates: r_all %.4f r_top %s p %s",
                n, r_all, r_top, p)
    return CorrelationReport(pairs, r_all, r_top, n, p,
                             [graph_hash(g) for g in graphs], baselines,
                             [_flops(g, task) for g in graphs])
