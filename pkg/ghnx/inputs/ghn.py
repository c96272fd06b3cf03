"""GHN input class"""
from collections import namedtuple

from ..errors import ConfigError
from ..ghn.model import ModelDims
from ..ghn.propagation import PropagationScheme, SCHEMES, DELIVERIES
from ..candidate.network import VARIANTS


_GhnConfig = namedtuple(
    "_GhnConfig",
    ["hidden", "hyper_hidden", "slab_channels", "max_kernel", "tile_bits",
     "scheme", "steps", "variant", "delivery"],
    defaults=[32, 64, 8, 7, 6, "forward-backward", 5, "sp+pe", "every-step"]
)


class GhnConfig(_GhnConfig):
    """Graph hypernetwork

    Parameters
    ----------
    hidden: int, default 32
       node embedding size
    hyper_hidden: int, default 64
       hidden width of the hypernetwork and message MLPs
    slab_channels, max_kernel, tile_bits: int
       shape of the weight slabs the hypernetwork emits
    scheme: {"forward-backward", "synchronous"}
       message-passing schedule
    steps: int, default 5
       forward-backward sweeps or synchronous steps
    variant: {"sp+pe", "pe", "independent"}
       stacked variant (parameter sharing and embedding passing)
    delivery: {"every-step", "first-step"}
       when a passed embedding reaches the next block
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"ghn.scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"ghn.variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.delivery not in DELIVERIES:
            emsg = f"ghn.delivery must be one of {DELIVERIES}, got {self.delivery!r}"
            raise ConfigError(emsg)
        if self.steps < 0:
            raise ConfigError(f"ghn.steps must be >= 0, got {self.steps}")

    def dims(self, mode):
        """ModelDims for a search space"""
        return ModelDims(mode, self.hidden, self.hyper_hidden,
                         self.slab_channels, self.max_kernel, self.tile_bits)

    @property
    def propagation(self):
        return PropagationScheme(self.scheme, self.steps)
