"""Figure data from the results of earlier runs"""
import logging

from ..errors import InputError
from ..utils.records import read_json, read_csv, write_csv
from .loader import RunLoader


logger = logging.getLogger(__name__)

HEADER = ["series", "x", "y"]


def correlation_series(doc):
    """Scatter of predicted (x) against true (y) accuracy"""
    return [("ghn", p, t) for p, t in doc["pairs"]]


def comparison_series(doc):
    """True accuracy by rank within the top-k and the random k"""
    rows = []
    for series in ("top", "random"):
        rows += [(series, i + 1, acc) for i, (_, acc) in enumerate(doc[series])]
    return rows


def ablation_series(header, table):
    """r_all and r_top against the ablated setting"""
    col = {name: i for i, name in enumerate(header)}
    rows = []
    for series in ("r_all", "r_top"):
        for r in table:
            if r[col[series]] != "":
                rows.append((series, r[col["setting"]], float(r[col[series]])))
    return rows


def anytime_series(doc, limit=10):
    """Predicted accuracy against FLOPs of the best candidates"""
    rows = []
    for c in doc["candidates"][:limit]:
        rows += [(c["hash"], f, a) for f, a in c["points"]]
    return rows


class PlotData:
    """Write (series, x, y) CSV tables for every result found in the run

    Parameters
    ----------
    config: inputs.run.RunConfig
       run configuration
    """
    name = "plotdata"

    def __init__(self, config):
        self.config = config
        self.loader = RunLoader(config)

    def run(self, outdir):
        written = []

        def emit(name, rows):
            path = outdir / f"plot-{name}.csv"
            echo = dict(self.loader.echo, source=name)
            write_csv(path, HEADER, rows, echo=echo)
            written.append(path)

        if (outdir / "correlation.json").exists():
            emit("correlation", correlation_series(
                read_json(outdir / "correlation.json")))
        if (outdir / "comparison.json").exists():
            emit("random-vs-top", comparison_series(
                read_json(outdir / "comparison.json")))
        for path in sorted(outdir.glob("ablation-*.csv")):
            emit(path.stem, ablation_series(*read_csv(path)))
        if (outdir / "search_report.json").exists():
            doc = read_json(outdir / "search_report.json")
            if doc["config"].get("mode") == "anytime":
                emit("anytime", anytime_series(doc))
        if not written:
            emsg = f"no results in {outdir}; run correlate, search or ablate first"
            raise InputError(emsg)
        for path in written:
            print(f"wrote {path}")
