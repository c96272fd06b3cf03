"""Loaders: turn input specifications and files into live objects"""
from . import dataset
from . import checkpoint
from . import config
