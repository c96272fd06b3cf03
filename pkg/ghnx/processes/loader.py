"""Live objects shared by the processes of a run"""
import logging

from ..errors import InputError
from ..candidate.network import build_setup
from ..candidate.training import restore_models
from ..loaders.checkpoint import load_checkpoint
from ..loaders.config import to_dict
from ..loaders.dataset import read_dataset
from ..search.correlation import Task


logger = logging.getLogger(__name__)

TRAIN_FILE = "train.ghnd"
VAL_FILE = "val.ghnd"

# (section, key) pairs that steer a run without changing its results
RUN_CONTROL = (("training", "resume"), ("training", "stop_after"))


class RunLoader:
    """Load what a RunConfig names: data, GHN models and the candidate task

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """

    def __init__(self, config):
        self.config = config
        self._train = None
        self._val = None

    @property
    def echo(self):
        """Configuration echo written next to every result

        Run-control keys are left out, so an interrupted and resumed run
        echoes the same configuration as an uninterrupted one.
        """
        echo = to_dict(self.config)
        for section, key in RUN_CONTROL:
            echo[section].pop(key, None)
        return echo

    def _read(self, name):
        path = self.config.data_directory / name
        if not path.exists():
            emsg = f"dataset file {path} does not exist; run gen-data first"
            raise InputError(emsg)
        return read_dataset(path)

    @property
    def train(self):
        if self._train is None:
            self._train = self._read(TRAIN_FILE)
        return self._train

    @property
    def val(self):
        if self._val is None:
            self._val = self._read(VAL_FILE)
        return self._val

    def setup(self, ghn=None, seed=None):
        """Freshly initialized GhnSetup of the run"""
        cfg = self.config
        ghn = cfg.ghn if ghn is None else ghn
        return build_setup(
            ghn.dims(cfg.mode), ghn.propagation,
            cfg.seed if seed is None else seed, ghn.variant,
            cfg.space.repeat, ghn.delivery
        )

    def trained_setup(self):
        """GhnSetup with the weights of the run's checkpoint"""
        path = self.config.checkpoint_file
        if not path.exists():
            raise InputError(f"checkpoint {path} does not exist; run train first")
        tensors, state, _ = load_checkpoint(path)
        setup = self.setup()
        restore_models(setup.models, tensors)
        logger.info("loaded GHN from %s (step %s)", path, state.get("step"))
        return setup

    def task(self):
        """Candidate task for correlation and ablation"""
        cfg = self.config
        s = cfg.search
        return Task(
            cfg.mode, self.train, self.val, cfg.space.macro,
            cfg.space.eval_nodes, cfg.space.n_exits, s.truth_lr,
            s.truth_batch, s.eval_batch
        )
