"""Search space input class"""
from collections import namedtuple

from ..errors import ConfigError
from ..candidate.network import MacroConfig


_SpaceConfig = namedtuple(
    "_SpaceConfig",
    ["train_nodes", "eval_nodes", "n_exits", "repeat", "reductions",
     "channels", "arch"],
    defaults=[7, 17, 1, 1, (), 16, None]
)


class SpaceConfig(_SpaceConfig):
    """Candidate architectures

    Parameters
    ----------
    train_nodes: int, default 7
       operator nodes of the graphs the GHN trains on (the maximum when
       node counts are random)
    eval_nodes: int, default 17
       operator nodes of the candidates searched and benchmarked
    n_exits: int, default 1
       anytime only: early exits per graph
    repeat: int, default 1
       standard only: block positions of the network
    reductions: tuple of int, default ()
       standard only: 1-based block positions that halve the resolution
    channels: int, default 16
       initial width
    arch: str, optional
       architecture JSON file audited by the flops command
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        for key in ("train_nodes", "eval_nodes", "repeat", "channels"):
            if getattr(self, key) < 1:
                raise ConfigError(f"space.{key} must be >= 1, got {getattr(self, key)}")
        if self.n_exits < 0:
            raise ConfigError(f"space.n_exits must be >= 0, got {self.n_exits}")
        bad = [r for r in self.reductions if not 1 <= r <= self.repeat]
        if bad:
            emsg = (
                f"space.reductions {bad} are outside the block positions "
                f"1..{self.repeat}"
            )
            raise ConfigError(emsg)

    @property
    def macro(self):
        """MacroConfig of the candidate networks"""
        return MacroConfig(self.repeat, tuple(self.reductions), self.channels)
