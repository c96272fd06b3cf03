"""Ablations: one GHN per setting, each scored by its correlation

Axes
----
nodes
   operator nodes of the GHN training graphs
steps
   propagation steps T (synchronous steps or forward-backward sweeps)
scheme
   synchronous and forward-backward, each at every T of the grid
stacked
   stacked variants "independent", "pe" and "sp+pe"

Every setting trains from the same seeds and is benchmarked on the same
candidates, so settings differ only along the ablated axis. Ground truth is
computed once per candidate and shared across settings.
"""
from collections import namedtuple
import logging

import numpy as np

from ..errors import InputError, StatisticsError
from ..candidate.network import build_setup, VARIANTS
from ..candidate.training import GhnTrainer
from ..ghn.propagation import PropagationScheme, SCHEMES, EVERY_STEP
from ..utils.records import write_csv
from .correlation import correlation_benchmark, sgd_truth, TruthCache


logger = logging.getLogger(__name__)


AXES = ("nodes", "steps", "scheme", "stacked")
HEADER = ["setting", "r_all", "r_top", "seeds"]


Experiment = namedtuple(
    "Experiment", ["dims", "scheme", "train", "variant", "delivery"],
    defaults=[VARIANTS[0], EVERY_STEP]
)
Experiment.__doc__ = """Base configuration the ablation varies

Parameters
----------
dims: ghn.model.ModelDims
   model sizes
scheme: PropagationScheme
   message-passing schedule
train: candidate.training.GhnTrainConfig
   GHN training schedule (its seed is replaced by each ablation seed)
variant: {"sp+pe", "pe", "independent"}
   stacked variant
delivery: {"every-step", "first-step"}
   hand-off delivery
"""


AblationRow = namedtuple("AblationRow", ["setting", "r_all", "r_top", "seeds"])


def settings(axis, grid, base):
    """(label, Experiment) of each grid point along an axis"""
    if axis not in AXES:
        raise InputError(f"ablation axis must be one of {AXES}, got {axis!r}")
    grid = list(grid)
    if not grid:
        raise InputError(f"empty grid for ablation axis {axis!r}")
    out = []
    if axis == "nodes":
        for n in grid:
            out.append((f"nodes={int(n)}",
                        base._replace(train=base.train._replace(max_nodes=int(n)))))
    elif axis == "steps":
        for t in grid:
            scheme = PropagationScheme(base.scheme.kind, int(t))
            out.append((f"T={int(t)}", base._replace(scheme=scheme)))
    elif axis == "scheme":
        for kind in SCHEMES:
            for t in grid:
                out.append((f"{kind},T={int(t)}",
                            base._replace(scheme=PropagationScheme(kind, int(t)))))
    else:
        for variant in grid:
            if variant not in VARIANTS:
                emsg = f"stacked variant must be one of {VARIANTS}, got {variant!r}"
                raise InputError(emsg)
            out.append((f"stacked={variant}", base._replace(variant=variant)))
    return out


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def run_setting(exp, task, n, truth_steps, seed, truth_cache, threads=1):
    """Train one GHN and benchmark it; returns (r_all, r_top)

    Both are None when the correlation is undefined, for instance when the
    GHN predicts the same accuracy for every candidate.
    """
    setup = build_setup(exp.dims, exp.scheme, seed, exp.variant,
                        task.macro.repeat, exp.delivery)
    trainer = GhnTrainer(setup, task.mode, task.macro, task.train,
                         exp.train._replace(seed=seed))
    trainer.run(log_every=0)
    try:
        report = correlation_benchmark(
            setup, n, truth_steps, seed, task,
            truth=sgd_truth(task, truth_steps, seed, truth_cache),
            threads=threads
        )
    except StatisticsError as e:
        logger.warning("seed %d: correlation undefined (%s)", seed, e)
        return None, None
    return report.r_all, report.r_top


def ablate(axis, grid, base, task, n, truth_steps, seeds=(0,), path=None,
           echo=None, threads=1):
    """Correlation of one GHN per setting along an ablation axis

    Parameters
    ----------
    axis: {"nodes", "steps", "scheme", "stacked"}
       what varies
    grid: sequence
       node counts, T values or stacked variant names
    base: Experiment
       everything that does not vary
    task: search.correlation.Task
       data and candidate shape
    n: int
       candidates per correlation benchmark
    truth_steps: int
       ground-truth training steps
    seeds: sequence of int
       seeds; r values are averaged over them
    path: str or Path, optional
       CSV file receiving the table
    echo: dict, optional
       configuration echoed in the CSV

    Returns
    -------
    list of AblationRow
    """
    points = settings(axis, grid, base)
    cache = TruthCache()
    rows = []
    for label, exp in points:
        r_all, r_top = [], []
        for seed in seeds:
            a, t = run_setting(exp, task, n, truth_steps, seed, cache, threads)
            r_all.append(a)
            r_top.append(t)
        row = AblationRow(label, _mean(r_all), _mean(r_top), len(seeds))
        logger.info("ablation %s: r_all %s r_top %s", label, row.r_all,
                    row.r_top)
        rows.append(row)
    if path is not None:
        write_csv(path, HEADER, rows, echo=echo)
    return rows
