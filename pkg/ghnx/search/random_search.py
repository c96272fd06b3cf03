"""Random search ranked by GHN-predicted accuracy

Candidates are sampled from the search space, embedded by a trained GHN and
evaluated on the validation split with the generated weights. Evaluations fan
out over worker threads; every worker reads the same frozen model snapshot
and results are keyed by candidate index, so the report does not depend on
completion order.
"""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import logging
import time

import numpy as np

from ..errors import InputError
from ..arch.graph import ANYTIME
from ..arch.sampling import sample_block
from ..arch.serialize import serialize, graph_hash
from ..candidate.evaluate import eval_with_generated
from ..ghn.model import GhnModel
from ..utils import rng as stream_rng
from .stats import anytime_auc, dedupe_points


logger = logging.getLogger(__name__)


Candidate = namedtuple(
    "Candidate",
    ["index", "hash", "graph", "predicted", "accuracy", "auc", "flops",
     "points"]
)
Candidate.__doc__ = """One evaluated candidate

Parameters
----------
index: int
   sample index (selects the candidate's random stream)
hash: str
   graph hash
graph: str
   serialized graph
predicted: float
   ranking score: predicted accuracy in the standard space, area under the
   predicted accuracy-FLOPs curve in the anytime space
accuracy: float
   predicted accuracy of the final head
auc: float or None
   anytime only: area under the accuracy-FLOPs curve
flops: int
   FLOPs of the full forward pass
points: list of (int, float)
   (FLOPs, predicted accuracy) of every exit and the head
"""


SearchReport = namedtuple(
    "SearchReport", ["candidates", "top_k", "config", "timing"]
)
SearchReport.__doc__ = """Ranked result of a random search

Parameters
----------
candidates: list of Candidate
   sorted by `predicted` descending, ties broken by graph hash
top_k: list of str
   hashes of the first min(k, len(candidates)) candidates
config: dict
   configuration echo, seed included
timing: dict
   wall-clock seconds per phase
"""


Comparison = namedtuple(
    "Comparison", ["top", "random", "top_mean", "random_mean", "margin"]
)
Comparison.__doc__ = """True accuracy of the top-k against a random k

Parameters
----------
top, random: list of (str, float)
   (graph hash, true accuracy) of each subset
top_mean, random_mean: float
   subset means
margin: float
   top_mean - random_mean
"""


def sample_candidates(mode, count, seed, nodes, n_exits=1, stream="search"):
    """Sample `count` block graphs, each from its own substream"""
    graphs = []
    for i in range(count):
        r = stream_rng(seed, stream, i)
        if mode == ANYTIME:
            graphs.append(sample_block(mode, nodes, r,
                                       n_exits=min(n_exits, nodes)))
        else:
            graphs.append(sample_block(mode, nodes, r))
    return graphs


def frozen(setup):
    """Copy of a GhnSetup whose models are read-only snapshots"""
    models = setup.models
    if isinstance(models, GhnModel):
        snap = models.snapshot()
    else:
        snap = [m.snapshot() for m in models]
    return setup._replace(models=snap)


def _auc(mode, result):
    """AUC of the predicted curve, or None when it has fewer than two points"""
    if mode != ANYTIME:
        return None
    points = dedupe_points(result.points)
    return anytime_auc(points) if len(points) >= 2 else None


def evaluate_candidates(setup, graphs, val, macro, threads=1, batch_size=250):
    """EvalResult of every graph, in input order"""
    snap = frozen(setup)

    def work(g):
        return eval_with_generated(snap, g, val, macro, batch_size)

    if threads <= 1:
        return [work(g) for g in graphs]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(work, g) for g in graphs]
        return [f.result() for f in futures]


def rank(candidates):
    """Candidates by score descending, ties by graph hash then index"""
    return sorted(candidates, key=lambda c: (-c.predicted, c.hash, c.index))


def random_search(setup, mode, count, k, seed, val, macro, nodes, n_exits=1,
                  threads=1, batch_size=250):
    """Sample, evaluate with generated weights and rank candidates

    Parameters
    ----------
    setup: candidate.network.GhnSetup
       trained GHN
    mode: {"standard", "anytime"}
       search space
    count: int
       number of candidates sampled
    k: int
       size of the top set
    seed: int
       run seed
    val: loaders.dataset.Dataset
       validation split
    macro: candidate.network.MacroConfig
       how each block becomes a network
    nodes: int
       operator nodes per candidate
    n_exits: int
       anytime only: exits per candidate
    threads: int
       evaluation workers

    Returns
    -------
    SearchReport
    """
    if k < 1:
        raise InputError(f"top-k size must be >= 1, got {k}")
    if count < k:
        raise InputError(f"cannot select top {k} of {count} candidates")
    t0 = time.perf_counter()
    graphs = sample_candidates(mode, count, seed, nodes, n_exits)
    t1 = time.perf_counter()
    logger.info("sampled %d %s candidates in %.2fs", count, mode, t1 - t0)

    results = evaluate_candidates(setup, graphs, val, macro, threads,
                                  batch_size)
    t2 = time.perf_counter()
    logger.info("evaluated %d candidates on %d threads in %.2fs",
                count, threads, t2 - t1)

    candidates = []
    for i, (g, res) in enumerate(zip(graphs, results)):
        auc = _auc(mode, res)
        score = res.accuracy if auc is None else auc
        candidates.append(Candidate(
            i, graph_hash(g), serialize(g), score, res.accuracy, auc,
            res.flops, res.points
        ))
    ranked = rank(candidates)
    config = {
        "mode": mode, "count": count, "k": k, "seed": seed, "nodes": nodes,
        "n_exits": n_exits, "macro": macro._asdict(),
    }
    timing = {"sample": t1 - t0, "evaluate": t2 - t1}
    return SearchReport(ranked, [c.hash for c in ranked[:k]], config, timing)


def compare_top_random(report, k, truth, seed):
    """Train the top-k and a random k with a ground-truth trainer

    Parameters
    ----------
    report: SearchReport
       ranked candidates
    k: int
       subset size
    truth: callable
       candidate -> true accuracy
    seed: int
       seed of the random subset

    Returns
    -------
    Comparison
    """
    n = len(report.candidates)
    if not 1 <= k <= n:
        raise InputError(f"subset size must be in [1, {n}], got {k}")
    top = report.candidates[:k]
    r = stream_rng(seed, "compare")
    pick = sorted(r.choice(n, size=k, replace=False))
    rand = [report.candidates[i] for i in pick]

    cache = {}

    def true_acc(c):
        if c.hash not in cache:
            cache[c.hash] = float(truth(c))
        return cache[c.hash]

    top_acc = [(c.hash, true_acc(c)) for c in top]
    rand_acc = [(c.hash, true_acc(c)) for c in rand]
    top_mean = float(np.mean([a for _, a in top_acc]))
    rand_mean = float(np.mean([a for _, a in rand_acc]))
    logger.info("top-%d mean %.4f, random-%d mean %.4f", k, top_mean, k,
                rand_mean)
    return Comparison(top_acc, rand_acc, top_mean, rand_mean,
                      top_mean - rand_mean)
