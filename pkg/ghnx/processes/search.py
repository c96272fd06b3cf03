"""Search, correlation and ablation runs"""
import logging

from ..arch.serialize import deserialize
from ..candidate.training import sgd_train_candidate
from ..search.ablation import Experiment, ablate
from ..search.correlation import correlation_benchmark, sgd_surrogate
from ..search.random_search import random_search, compare_top_random
from ..utils.records import write_json, write_csv, JsonLines
from .loader import RunLoader


logger = logging.getLogger(__name__)

EVALUATIONS_FILE = "evaluations.jsonl"


def evaluation_record(hash_, predicted, true, flops, seed):
    """One line of the evaluations file"""
    return {"graph-hash": hash_, "predicted-acc": predicted,
            "true-acc": true, "flops": flops, "seed": seed}


class Search:
    """Random search with the trained GHN

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "search"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def run(self, outdir):
        cfg = self.config
        ldr = self.loader
        s = cfg.search
        report = random_search(
            ldr.trained_setup(), cfg.mode, s.candidates, s.top_k, cfg.seed,
            ldr.val, cfg.space.macro, cfg.space.eval_nodes,
            n_exits=cfg.space.n_exits, threads=cfg.run.threads,
            batch_size=s.eval_batch
        )
        report = report._replace(config=dict(report.config, run=ldr.echo))
        write_json(outdir / "search_report.json", report)
        log = JsonLines(outdir / EVALUATIONS_FILE)
        for c in report.candidates:
            log.append(evaluation_record(c.hash, c.predicted, None, c.flops,
                                         cfg.seed))
        print(f"top-{s.top_k} of {s.candidates} candidates:")
        for c in report.candidates[:s.top_k]:
            print(f"  {c.hash}  predicted {c.predicted:.4f}  flops {c.flops}")

        if s.compare:
            def truth(c):
                return sgd_train_candidate(
                    deserialize(c.graph), ldr.train, ldr.val, s.truth_steps,
                    cfg.seed, cfg.space.macro, lr=s.truth_lr,
                    batch_size=s.truth_batch, eval_batch=s.eval_batch
                )

            cmp = compare_top_random(report, s.top_k, truth, cfg.seed)
            write_json(outdir / "comparison.json",
                       dict(cmp._asdict(), config=ldr.echo))
            print(f"top-{s.top_k} mean {cmp.top_mean:.4f}, random mean "
                  f"{cmp.random_mean:.4f}, margin {cmp.margin:+.4f}")


class Correlate:
    """Correlation between GHN-predicted and trained accuracy

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "correlate"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def run(self, outdir):
        cfg = self.config
        ldr = self.loader
        s = cfg.search
        task = ldr.task()
        surrogates = {
            f"sgd-{n}": sgd_surrogate(task, n, cfg.seed)
            for n in s.baseline_steps
        }
        report = correlation_benchmark(
            ldr.trained_setup(), s.correlation_n, s.truth_steps, cfg.seed,
            task, surrogates=surrogates, threads=cfg.run.threads
        )
        write_json(outdir / "correlation.json",
                   dict(report._asdict(), config=ldr.echo))
        log = JsonLines(outdir / EVALUATIONS_FILE)
        for h, (p, t), f in zip(report.hashes, report.pairs, report.flops):
            log.append(evaluation_record(h, p, t, f, cfg.seed))
        rows = [(h, p, t) for h, (p, t) in zip(report.hashes, report.pairs)]
        write_csv(outdir / "correlation.csv", ["hash", "predicted", "true"],
                  rows, echo=ldr.echo)
        print(f"GHN: r_all {report.r_all:.4f}  r_top {_fmt(report.r_top)}  "
              f"p {_fmt(report.p_value)}  (n={report.n})")
        for name, r_all, r_top in report.baselines:
            print(f"{name}: r_all {_fmt(r_all)}  r_top {_fmt(r_top)}")


class Ablate:
    """One GHN per setting along an ablation axis

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "ablate"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def run(self, outdir):
        cfg = self.config
        ldr = self.loader
        s = cfg.search
        base = Experiment(
            cfg.ghn.dims(cfg.mode), cfg.ghn.propagation,
            cfg.training.schedule(cfg.space, cfg.mode, cfg.seed),
            cfg.ghn.variant, cfg.ghn.delivery
        )
        rows = ablate(
            s.ablate_axis, s.grid, base, ldr.task(), s.correlation_n,
            s.truth_steps, seeds=s.ablate_seeds,
            path=outdir / f"ablation-{s.ablate_axis}.csv", echo=ldr.echo,
            threads=cfg.run.threads
        )
        for row in rows:
            print(f"{row.setting}: r_all {_fmt(row.r_all)}  r_top {_fmt(row.r_top)}")


def _fmt(x):
    return "n/a" if x is None else f"{x:.4f}"
