"""Input classes"""
from . import run
from . import space
from . import ghn
from . import task
from . import training
from . import search
