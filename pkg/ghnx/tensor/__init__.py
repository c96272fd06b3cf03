"""Tensor engine with reverse-mode automatic differentiation"""
from .tensor import Tensor, Tape, as_tensor, current_tape
from . import ops
from . import conv
from . import optim
from . import gradcheck
