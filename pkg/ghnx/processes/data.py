"""Dataset generation"""
import hashlib
import logging

from ..loaders.dataset import generate_gratings, write_dataset
from ..utils import stream, setup_output
from ..utils.records import write_json
from .loader import TRAIN_FILE, VAL_FILE


logger = logging.getLogger(__name__)


class GenData:
    """Write the desk-scale task

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "gen-data"

    def __init__(self, config):
        self.config = config

    def run(self, outdir):
        """Write both splits and a manifest with their checksums

        Parameters
        ----------
        outdir: pathlib.Path
            run output directory (the data go to the data directory)
        """
        cfg = self.config
        t = cfg.task
        datadir = setup_output(cfg.data_directory)
        manifest = {"config": t._asdict(), "seed": cfg.seed, "files": {}}
        splits = (
            (TRAIN_FILE, t.train_count, "data-train"),
            (VAL_FILE, t.val_count, "data-val"),
        )
        for fname, count, name in splits:
            ds = generate_gratings(count, t.num_classes, t.channels, t.size,
                                   t.noise, seed=stream(cfg.seed, name))
            path = datadir / fname
            write_dataset(path, ds)
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            manifest["files"][fname] = {"count": count, "sha256": digest}
        write_json(datadir / "manifest.json", manifest)
        print(f"wrote {t.train_count} + {t.val_count} images to {datadir}")
