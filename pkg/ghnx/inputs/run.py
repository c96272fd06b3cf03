"""Run input classes"""
from collections import namedtuple
import pathlib

from ..errors import ConfigError
from ..arch.graph import MODES


_RunSpec = namedtuple(
    "_RunSpec", ["name", "mode", "seed", "outdir", "threads"],
    defaults=["ghnx", "standard", None, "Outputs", 1]
)


class RunSpec(_RunSpec):
    """What is run, and where

    Parameters
    ----------
    name: str
       run name
    mode: {"standard", "anytime"}
       search space
    seed: int, optional
       run seed (unset: the GHN_SEED environment variable, then 0)
    outdir: str, default "Outputs"
       base output directory
    threads: int, default 1
       evaluation workers
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.mode not in MODES:
            raise ConfigError(f"run.mode must be one of {MODES}, got {self.mode!r}")
        if self.seed is not None and int(self.seed) < 0:
            raise ConfigError(f"run.seed must be >= 0, got {self.seed}")
        if self.threads < 1:
            raise ConfigError(f"run.threads must be >= 1, got {self.threads}")
        if not self.name or "/" in self.name:
            raise ConfigError(f"run.name must be a plain non-empty name, got {self.name!r}")


_RunConfigBase = namedtuple(
    "_RunConfigBase", ["run", "space", "ghn", "task", "training", "search"]
)


class RunConfig(_RunConfigBase):
    """Complete configuration of a ghnx run

    Parameters
    ----------
    run: RunSpec
       name, mode, seed, output location and workers
    space: inputs.space.SpaceConfig
       candidate architectures
    ghn: inputs.ghn.GhnConfig
       graph hypernetwork
    task: inputs.task.TaskConfig
       dataset
    training: inputs.training.TrainConfig
       GHN training budget
    search: inputs.search.SearchConfig
       search, correlation and ablation
    """

    @property
    def seed(self):
        return 0 if self.run.seed is None else int(self.run.seed)

    @property
    def mode(self):
        return self.run.mode

    @property
    def output_directory(self):
        """Name of output directory"""
        return pathlib.Path(self.run.outdir) / self.run.name / self.run.mode

    @property
    def data_directory(self):
        if self.task.data_dir is not None:
            return pathlib.Path(self.task.data_dir)
        return pathlib.Path(self.run.outdir) / self.run.name / "data"

    @property
    def log_file(self):
        """Name of log file"""
        return self.output_directory / "run.log"

    @property
    def checkpoint_file(self):
        return self.output_directory / "checkpoint.json"
