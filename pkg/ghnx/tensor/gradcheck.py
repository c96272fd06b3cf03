"""Central finite-difference gradient checks"""
import numpy as np

from .tensor import Tape


def analytic_gradients(fn, inputs):
    """Gradients of scalar fn(*inputs) from one recorded backward pass"""
    for t in inputs:
        t.requires_grad = True
        t.zero_grad()
    with Tape() as tape:
        out = fn(*inputs)
        tape.backward(out)
    return [np.zeros_like(t.data) if t.grad is None else t.grad.copy()
            for t in inputs]


def numerical_gradient(fn, inputs, index, eps=1e-4):
    """Central differences of scalar fn(*inputs) w.r.t. inputs[index]"""
    x = inputs[index].data
    grad = np.zeros_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = fn(*inputs).item()
        flat[i] = orig - eps
        fm = fn(*inputs).item()
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * eps)
    return grad


def relative_error(a, b):
    """||a - b|| / (||a|| + ||b||), guarded near zero"""
    num = np.linalg.norm(a - b)
    den = max(np.linalg.norm(a) + np.linalg.norm(b), 1e-8)
    return num / den


def gradient_error(fn, inputs, eps=1e-4, only=None):
    """Largest relative error between analytic and numerical gradients

    Parameters
    ----------
    fn: callable
       maps the input tensors to a scalar Tensor
    inputs: list of Tensor
       point of evaluation; modified temporarily
    eps: float
       perturbation
    only: list of int, optional
       indices of the inputs to check (default all)

    Returns
    -------
    float
       maximum relative error over the checked inputs
    """
    analytic = analytic_gradients(fn, inputs)
    indices = range(len(inputs)) if only is None else only
    return max(
        relative_error(analytic[i], numerical_gradient(fn, inputs, i, eps))
        for i in indices
    )
