"""FLOP audit of one network"""
import logging

from ..arch.network import count_parameters
from ..arch.flops import count_flops
from ..arch.sampling import sample_block
from ..arch.serialize import load, graph_hash
from ..candidate.network import network_for
from ..utils import rng
from ..utils.records import write_csv
from .loader import RunLoader


logger = logging.getLogger(__name__)


class Flops:
    """Per-block and total FLOPs of the configured network

    The block is read from `space.arch` or, when that is unset, sampled with
    `space.eval_nodes` nodes from the run seed.

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "flops"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def block(self):
        cfg = self.config
        if cfg.space.arch is not None:
            return load(cfg.space.arch)
        n_exits = min(cfg.space.n_exits, cfg.space.eval_nodes)
        return sample_block(cfg.mode, cfg.space.eval_nodes,
                            rng(cfg.seed, "search"), n_exits=n_exits)

    def run(self, outdir):
        cfg = self.config
        t = cfg.task
        image_shape = (t.channels, t.size, t.size)
        g = self.block()
        spec = network_for(g, cfg.space.macro)
        report = count_flops(spec, image_shape, t.num_classes)
        nparams = count_parameters(spec, image_shape, t.num_classes)

        rows = [("stem", report.stem)]
        rows += [(f"block{i + 1}", f) for i, f in enumerate(report.blocks)]
        rows += [("head", report.head)]
        rows += [(f"exit{key}", f) for key, f in report.exits if key != "head"]
        rows += [("total", report.total)]
        write_csv(outdir / "flops.csv", ["part", "flops"], rows,
                  echo={"graph": graph_hash(g), "run": self.loader.echo})
        print(f"network {graph_hash(g)}: {len(report.blocks)} blocks, "
              f"{nparams} parameters")
        for part, f in rows:
            print(f"  {part:>10s}  {f}")
