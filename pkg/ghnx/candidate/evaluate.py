"""Accuracy of candidates under generated or owned weights"""
from collections import namedtuple

import numpy as np

from ..arch.flops import count_flops
from ..arch.network import layout
from .network import network_for, generate_candidate


EvalResult = namedtuple("EvalResult", ["accuracy", "points", "flops"])
EvalResult.__doc__ = """Evaluation of one candidate

Parameters
----------
accuracy: float
   accuracy of the final head
points: list of (int, float)
   (FLOPs, accuracy) of every exit and of the final head, sorted by FLOPs;
   a single point in the standard space
flops: int
   FLOPs of the full forward pass
"""


def accuracies(net, ds, batch_size=250):
    """Accuracy of each exit and of the final head on a dataset

    Returns
    -------
    dict
       exit node id (or "head") -> fraction of correctly classified samples
    """
    correct = {}
    for batch in ds.batches(batch_size):
        out = net(batch.images)
        heads = list(out.exits) + [("head", out.logits)]
        for key, logits in heads:
            pred = np.argmax(logits.data, axis=1)
            correct[key] = correct.get(key, 0) + int(np.sum(pred == batch.labels))
    return {k: c / len(ds) for k, c in correct.items()}


def accuracy_points(acc, flops_report):
    """(FLOPs, accuracy) per exit and final head, sorted by FLOPs"""
    points = [(int(f), acc[key]) for key, f in flops_report.exits]
    return sorted(points, key=lambda p: p[0])


def eval_with_generated(setup, g, val, macro, batch_size=250):
    """Validation accuracy of a block graph under GHN-generated weights

    Parameters
    ----------
    setup: candidate.network.GhnSetup
       trained GHN and how it embeds networks
    g: ArchGraph
       candidate block graph
    val: loaders.dataset.Dataset
       validation split
    macro: candidate.network.MacroConfig
       how the block becomes a network
    batch_size: int
       evaluation batch size (does not change the result)

    Returns
    -------
    EvalResult
    """
    spec = network_for(g, macro)
    lay = layout(spec, val.image_shape, val.num_classes)
    net = generate_candidate(setup, spec, lay)
    report = count_flops(spec, val.image_shape, val.num_classes)
    acc = accuracies(net, val, batch_size)
    return EvalResult(acc["head"], accuracy_points(acc, report), report.total)
