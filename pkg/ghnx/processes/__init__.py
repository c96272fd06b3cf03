"""This is the module for defining and executing ghnx processes"""
import logging

from .data import GenData
from .train import Train
from .search import Search, Correlate, Ablate
from .flops import Flops
from .plotdata import PlotData

from ..loaders.config import dump_config
from ..utils import setup_output, setup_logging


processes = (GenData, Train, Search, Correlate, Ablate, Flops, PlotData)
process_dict = {}
for p in processes:
    process_dict[p.name] = p


def run(name, config, verbose=False):
    """Run a process

    PARAMETERS
    ----------
    name: str
       process name, one of `process_dict`
    config: inputs.run.RunConfig
       the run configuration
    """
    outdir = setup_output(config.output_directory)
    setup_logging(config.log_file, verbose)
    logging.getLogger(__name__).info("%s: output in %s", name, outdir)
    dump_config(config, outdir / f"{name}-config.yaml")
    process = process_dict[name](config)
    process.run(outdir)
    return outdir
