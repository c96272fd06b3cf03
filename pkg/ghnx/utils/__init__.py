"""Utilities for output handling"""
import logging
import os
import pathlib

import numpy as np


logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Independent random streams; an index (step, candidate, ...) picks the
# substream.
STREAMS = {
    "ghn-init": 0,
    "ghn-graph": 1,
    "ghn-batch": 2,
    "search": 3,
    "correlation": 4,
    "sgd-init": 5,
    "sgd-batch": 6,
    "compare": 7,
    "data-train": 8,
    "data-val": 9,
}


def setup_output(outdir):
    """Make output directory if needed and return it as a Path.

    Parameters
    ----------
    outdir: str or Path
        name of output directory

    Returns
    -------
    pathlib.Path
        resolved output directory path
    """
    outdir = pathlib.Path(outdir)
    if not os.path.exists(outdir):
        logger.info("creating output directory: %s", outdir)
        os.makedirs(outdir)
    return outdir


def setup_logging(log_file=None, verbose=False):
    """Send ghnx log records to the console and, optionally, a file

    Parameters
    ----------
    log_file: str or Path, optional
        file receiving a copy of every record
    verbose: bool
        log DEBUG records too

    Returns
    -------
    logging.Logger
        the package logger
    """
    root = logging.getLogger("ghnx")
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    for h in list(root.handlers):
        root.removeHandler(h)
        h.close()

    fmt = logging.Formatter(LOG_FORMAT)
    console = logging.StreamHandler()
    console.setFormatter(fmt)
    root.addHandler(console)
    if log_file is not None:
        fh = logging.FileHandler(log_file)
        fh.setFormatter(fmt)
        root.addHandler(fh)
    return root


def stream(seed, name, index=0):
    """SeedSequence of the named stream and index under a run seed"""
    return np.random.SeedSequence([int(seed), STREAMS[name], int(index)])


def rng(seed, name, index=0):
    """Generator of the named stream and index under a run seed"""
    return np.random.default_rng(stream(seed, name, index))
