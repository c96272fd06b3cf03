"""Dense tensors and the reverse-mode recording tape

A `Tape` is made active with a ``with`` block; while it is active every
differentiable operation whose inputs require gradients appends a record to
it. `Tape.backward` then replays the records in exact reverse order and
accumulates into each tensor's ``grad``. Tapes are thread-local, so separate
threads may record separate programs over shared read-only parameters.
"""
from collections import namedtuple
import threading

import numpy as np

from ..errors import DimensionError, GhnxError


_local = threading.local()


_Record = namedtuple("_Record", ["inputs", "output", "backward"])
_Record.__doc__ = """One recorded operation

Parameters
----------
inputs: tuple of Tensor
   operands of the operation
output: Tensor
   result of the operation
backward: callable
   maps the output gradient (ndarray) to a tuple with one gradient (or None)
   per input
"""


class Tensor:
    """Dense float64 array with an optional gradient buffer

    Parameters
    ----------
    data: array_like
       values; copied into a float64 array
    requires_grad: bool, default False
       if True, gradients are accumulated into `grad` on backward passes
    name: str, optional
       label used in error messages and checkpoints
    """

    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        if 0 in self.data.shape:
            emsg = f"tensor dimensions must be positive, got {self.data.shape}"
            raise DimensionError(emsg)
        self.grad = None
        self.requires_grad = requires_grad
        self.node = None
        self.name = name

    def __repr__(self):
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label})"

    @classmethod
    def wrap(cls, data):
        """Wrap an ndarray without copying (for operation outputs)"""
        t = cls.__new__(cls)
        t.data = data
        t.grad = None
        t.requires_grad = False
        t.node = None
        t.name = None
        return t

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        """Copy of the values"""
        return self.data.copy()

    def detach(self):
        """New leaf tensor holding a copy of the values"""
        return Tensor(self.data, name=self.name)

    def zero_grad(self):
        self.grad = None

    def accumulate(self, g):
        """Add `g` into the gradient buffer"""
        if g.shape != self.data.shape:
            emsg = (
                f"gradient of shape {g.shape} does not match tensor "
                f"of shape {self.data.shape}"
            )
            raise DimensionError(emsg)
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad += g

    # Operator sugar; the functions live in ops.

    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from . import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def reshape(self, *shape):
        from . import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)


class Tape:
    """Recording of differentiable operations

    Use as a context manager; nested tapes shadow outer ones for the
    duration of the inner block.
    """

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        _stack().append(self)
        return self

    def __exit__(self, *exc):
        _stack().pop()
        return False

    def record(self, inputs, output, backward):
        """Append an operation and mark its output as recorded"""
        output.node = len(self.records)
        output.requires_grad = True
        self.records.append(_Record(tuple(inputs), output, backward))

    def backward(self, output, grad=None):
        """Accumulate gradients of `output` into every recorded input

        Parameters
        ----------
        output: Tensor
           tensor produced on this tape (usually a scalar loss)
        grad: ndarray, optional
           seed gradient; defaults to ones of the output's shape
        """
        if grad is None:
            grad = np.ones_like(output.data)
        output.accumulate(np.asarray(grad, dtype=np.float64))
        if output.node is None:
            return
        if output.node >= len(self.records) or \
           self.records[output.node].output is not output:
            raise GhnxError("tensor was not recorded on this tape")

        for rec in reversed(self.records[:output.node + 1]):
            g = rec.output.grad
            if g is None:
                continue
            grads = rec.backward(g)
            for inp, gi in zip(rec.inputs, grads):
                if gi is None or not inp.requires_grad:
                    continue
                inp.accumulate(gi)


def _stack():
    if not hasattr(_local, "tapes"):
        _local.tapes = []
    return _local.tapes


def current_tape():
    """Active tape of this thread, or None"""
    stack = _stack()
    return stack[-1] if stack else None


def as_tensor(x):
    """Return `x` if it is a Tensor, else a constant Tensor of its values"""
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def emit(data, inputs, backward):
    """Wrap an operation result, recording it when gradients are needed

    Parameters
    ----------
    data: ndarray
       computed output values
    inputs: sequence of Tensor
       operands
    backward: callable
       output gradient -> tuple of input gradients

    Returns
    -------
    Tensor
       the output
    """
    out = Tensor.wrap(np.asarray(data, dtype=np.float64))
    tape = current_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(inputs, out, backward)
    return out


def unbroadcast(g, shape):
    """Sum `g` down to `shape`, undoing numpy broadcasting"""
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g
