"""Task input class"""
from collections import namedtuple

from ..errors import ConfigError


_TaskConfig = namedtuple(
    "_TaskConfig",
    ["train_count", "val_count", "num_classes", "channels", "size", "noise",
     "data_dir"],
    defaults=[2000, 500, 10, 3, 16, 0.3, None]
)


class TaskConfig(_TaskConfig):
    """Desk-scale grating classification task

    Parameters
    ----------
    train_count, val_count: int
       images in the training and validation splits
    num_classes: int, default 10
       classes
    channels, size: int
       image channels and side length
    noise: float, default 0.3
       pixel noise
    data_dir: str, optional
       where the dataset files live (default: "data" in the run directory)
    """

    def __init__(self, *args, **kwargs):
        super(__class__, self).__init__()
        self.check_inputs()

    def check_inputs(self):
        for key in ("train_count", "val_count", "channels"):
            if getattr(self, key) < 1:
                raise ConfigError(f"task.{key} must be >= 1, got {getattr(self, key)}")
        if not 2 <= self.num_classes <= 255:
            raise ConfigError(f"task.num_classes must be in [2, 255], got {self.num_classes}")
        if self.size < 2:
            raise ConfigError(f"task.size must be >= 2, got {self.size}")
        if self.noise < 0:
            raise ConfigError(f"task.noise must be >= 0, got {self.noise}")
