"""Result files: JSON documents, JSON-lines logs and CSV tables

Every file carries the configuration echo so a result can be traced back to
the run that produced it. CSV files start with one "# " line holding the echo
as compact JSON, followed by an RFC-4180 table written by the csv module.
"""
import csv
import enum
import json
import pathlib

import numpy as np


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "_asdict"):
        return {k: _jsonable(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def dumps(obj):
    """Deterministic JSON text: sorted keys, no timestamps added"""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1)


def write_json(path, obj):
    pathlib.Path(path).write_text(dumps(obj) + "\n")


def read_json(path):
    return json.loads(pathlib.Path(path).read_text())


class JsonLines:
    """Append-only JSON-lines file

    Parameters
    ----------
    path: str or Path
        file name
    mode: {"a", "w"}
        append to, or replace, an existing file
    """

    def __init__(self, path, mode="a"):
        self.path = pathlib.Path(path)
        if mode == "w":
            self.path.write_text("")

    def append(self, record):
        with open(self.path, "a") as f:
            f.write(json.dumps(_jsonable(record), sort_keys=True))
            f.write("\n")


def read_jsonl(path):
    with open(path, "r") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_csv(path, header, rows, echo=None):
    """Write a CSV table, preceded by a "# " config echo line

    Parameters
    ----------
    path: str or Path
        output file
    header: list of str
        column names
    rows: iterable of sequences
        table rows
    echo: dict, optional
        configuration (and seed) echoed on the first line
    """
    with open(path, "w", newline="") as f:
        if echo is not None:
            f.write("# " + json.dumps(_jsonable(echo), sort_keys=True) + "\n")
        w = csv.writer(f)
        w.writerow(header)
        for r in rows:
            w.writerow([_jsonable(x) for x in r])


def read_csv(path):
    """Header and rows of a CSV table written by `write_csv`"""
    with open(path, "r", newline="") as f:
        lines = [line for line in f if not line.startswith("# ")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)
