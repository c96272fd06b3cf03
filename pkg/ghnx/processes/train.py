"""GHN training"""
import logging

from ..candidate.training import GhnTrainer
from ..loaders.checkpoint import save_checkpoint, load_checkpoint
from ..utils.records import JsonLines
from .loader import RunLoader


logger = logging.getLogger(__name__)


class Train:
    """Train the run's GHN, checkpointing and logging every step

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "train"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def trainer(self):
        cfg = self.config
        ldr = self.loader
        schedule = cfg.training.schedule(cfg.space, cfg.mode, cfg.seed)
        macro = cfg.space.macro._replace(reductions=())
        return GhnTrainer(ldr.setup(), cfg.mode, macro, ldr.train, schedule)

    def run(self, outdir):
        """Train and write checkpoint.json and train_log.jsonl

        Parameters
        ----------
        outdir: pathlib.Path
            output directory for all result files
        """
        cfg = self.config
        tc = cfg.training
        trainer = self.trainer()
        ckpt = cfg.checkpoint_file
        resumed = tc.resume and ckpt.exists()
        if resumed:
            tensors, state, _ = load_checkpoint(ckpt)
            trainer.restore(tensors, state)
            logger.info("resuming from %s at step %d", ckpt, trainer.step)
        log = JsonLines(outdir / "train_log.jsonl", "a" if resumed else "w")

        def on_checkpoint(t):
            save_checkpoint(ckpt, t.state_tensors(), t.state(),
                            self.loader.echo)

        until = tc.stop_after if tc.stop_after else None
        trainer.run(until=until, on_record=log.append,
                    on_checkpoint=on_checkpoint,
                    checkpoint_every=tc.checkpoint_every,
                    log_every=tc.log_every)
        print(f"trained {trainer.step}/{tc.steps} steps; checkpoint: {ckpt}")
