"""Adam optimizer and step-decay learning-rate schedule"""
from collections import namedtuple

import numpy as np

from ..errors import InputError, OptimizerError


AdamState = namedtuple("AdamState", ["step", "m", "v"])
AdamState.__doc__ = """Adam moment buffers

Parameters
----------
step: int
   number of updates applied so far
m: dict
   first-moment buffer for each parameter name
v: dict
   second-moment buffer for each parameter name
"""


def init_adam(params):
    """Zero moment buffers for a name -> Tensor mapping"""
    return AdamState(
        step=0,
        m={name: np.zeros_like(p.data) for name, p in params.items()},
        v={name: np.zeros_like(p.data) for name, p in params.items()},
    )


def adam_step(params, grads, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Apply one bias-corrected Adam update in place

    Parameters
    ----------
    params: dict
       name -> Tensor, updated in place
    grads: dict
       name -> ndarray gradient; missing or None entries count as zero
    state: AdamState
       current moment buffers
    lr: float
       learning rate (may be zero)
    beta1, beta2, eps: float
       Adam constants

    Returns
    -------
    params: dict
       the same mapping, updated
    state: AdamState
       new moment buffers with the step counter advanced by one
    """
    if lr < 0:
        raise InputError(f"learning rate must be non-negative, got {lr}")

    full = {}
    for name, p in params.items():
        g = grads.get(name)
        g = np.zeros_like(p.data) if g is None else np.asarray(g)
        if g.shape != p.data.shape:
            emsg = (
                f"gradient for {name} has shape {g.shape}, "
                f"parameter has {p.data.shape}"
            )
            raise OptimizerError(emsg, name=name)
        if not np.all(np.isfinite(g)):
            raise OptimizerError(f"non-finite gradient for {name}", name=name)
        full[name] = g

    t = state.step + 1
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    m_new, v_new = {}, {}
    for name, p in params.items():
        g = full[name]
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * g * g
        p.data -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
        m_new[name], v_new[name] = m, v

    return params, AdamState(step=t, m=m_new, v=v_new)


def step_decay(step, total, base_lr, milestones=(0.5, 0.75), gamma=0.5):
    """Learning rate at `step` of `total` under step decay

    The rate is multiplied by `gamma` at each milestone, given as a
    fraction of the step budget (0.5 and 0.75 of 200 epochs are epochs 100
    and 150).
    """
    n = sum(1 for f in milestones if step >= int(round(f * total)))
    return base_lr * gamma ** n
