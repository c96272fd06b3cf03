"""GHN training input class"""
from collections import namedtuple

from ..errors import ConfigError
from ..arch.graph import ANYTIME
from ..candidate.training import GhnTrainConfig


_TrainConfig = namedtuple(
    "_TrainConfig",
    ["steps", "batch_size", "lr", "milestones", "gamma", "random_nodes",
     "checkpoint_every", "log_every", "resume", "stop_after"],
    defaults=[200, 64, 1e-3, (0.5, 0.75), 0.5, False, 50, 10, False, 0]
)


class TrainConfig(_TrainConfig):
    """GHN training budget

    Parameters
    ----------
    steps: int, default 200
       GHN steps of the full schedule
    batch_size: int, default 64
       images per step
    lr: float, default 1e-3
       initial Adam learning rate
    milestones: tuple of float, default (0.5, 0.75)
       fractions of `steps` where the learning rate is multiplied by `gamma`
    gamma: float, default 0.5
       decay factor
    random_nodes: bool, default False
       draw training node counts at random up to space.train_nodes
    checkpoint_every: int, default 50
       checkpoint cadence in steps (0: at the end only)
    log_every: int, default 10
       cadence of log lines
    resume: bool, default False
       continue from the run's checkpoint when one exists
    stop_after: int, default 0
       stop once this many steps are complete (0: run the full schedule);
       the schedule itself still spans `steps`
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.steps < 0:
            raise ConfigError(f"training.steps must be >= 0, got {self.steps}")
        if self.batch_size < 1:
            raise ConfigError(f"training.batch_size must be >= 1, got {self.batch_size}")
        if not self.lr > 0:
            raise ConfigError(f"training.lr must be positive, got {self.lr}")
        if any(not 0 < m < 1 for m in self.milestones):
            raise ConfigError(f"training.milestones must lie in (0, 1), got {self.milestones}")
        for key in ("checkpoint_every", "log_every", "stop_after"):
            if getattr(self, key) < 0:
                raise ConfigError(f"training.{key} must be >= 0")

    def schedule(self, space, mode, seed):
        """GhnTrainConfig for a search space and seed"""
        return GhnTrainConfig(
            self.steps, self.batch_size, self.lr, tuple(self.milestones),
            self.gamma, space.train_nodes, self.random_nodes,
            space.n_exits if mode == ANYTIME else 1, seed
        )
