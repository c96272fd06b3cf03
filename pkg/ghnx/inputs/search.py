"""Search input class"""
from collections import namedtuple

from ..errors import ConfigError
from ..search.ablation import AXES


_SearchConfig = namedtuple(
    "_SearchConfig",
    ["candidates", "top_k", "compare", "correlation_n", "truth_steps",
     "truth_lr", "truth_batch", "baseline_steps", "eval_batch",
     "ablate_axis", "ablate_grid", "ablate_seeds"],
    defaults=[100, 10, False, 30, 500, 1e-3, 64, (), 250, "scheme",
              (1, 3, 5), (0,)]
)


class SearchConfig(_SearchConfig):
    """Random search, correlation benchmark and ablation

    Parameters
    ----------
    candidates: int, default 100
       candidates sampled by a random search
    top_k: int, default 10
       size of the selected set
    compare: bool, default False
       train the top-k and a random k from scratch after a search
    correlation_n: int, default 30
       candidates of a correlation benchmark
    truth_steps: int, default 500
       training steps of the ground truth
    truth_lr, truth_batch:
       learning rate and batch size of the ground truth
    baseline_steps: tuple of int, default ()
       short-training surrogates correlated next to the GHN
    eval_batch: int, default 250
       evaluation batch size
    ablate_axis: {"nodes", "steps", "scheme", "stacked"}
       ablation axis
    ablate_grid: tuple
       node counts, T values or stacked variants
    ablate_seeds: tuple of int, default (0,)
       ablation seeds (results are averaged)
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.top_k < 1:
            raise ConfigError(f"search.top_k must be >= 1, got {self.top_k}")
        if self.candidates < self.top_k:
            emsg = (
                f"search.candidates ({self.candidates}) must be at least "
                f"search.top_k ({self.top_k})"
            )
            raise ConfigError(emsg)
        if self.correlation_n < 2:
            raise ConfigError(f"search.correlation_n must be >= 2, got {self.correlation_n}")
        if self.truth_steps < 0 or any(s < 0 for s in self.baseline_steps):
            raise ConfigError("search training steps must be >= 0")
        if self.ablate_axis not in AXES:
            raise ConfigError(f"search.ablate_axis must be one of {AXES}, got {self.ablate_axis!r}")
        if not self.ablate_seeds:
            raise ConfigError("search.ablate_seeds must not be empty")

    @property
    def grid(self):
        """Ablation grid with numbers where the axis expects them"""
        if self.ablate_axis == "stacked":
            return tuple(str(v) for v in self.ablate_grid)
        try:
            return tuple(int(v) for v in self.ablate_grid)
        except ValueError as e:
            emsg = f"search.ablate_grid must hold integers for axis {self.ablate_axis!r}"
            raise ConfigError(emsg) from e
