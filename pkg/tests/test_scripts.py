"""Tests for the command line interface"""
import json
import pathlib

import pytest

from ghnx.scripts.ghnx import main, EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME
from ghnx.loaders.config import SEED_VARIABLE
from ghnx.utils.records import read_csv, read_json, read_jsonl, write_json


DATA = pathlib.Path(__file__).parent / "data"

TINY = [
    "--run-name", "tiny",
    "--task-train-count", "24", "--task-val-count", "12",
    "--task-num-classes", "3", "--task-channels", "1", "--task-size", "8",
    "--space-train-nodes", "2", "--space-eval-nodes", "3",
    "--space-channels", "4",
    "--ghn-hidden", "8", "--ghn-hyper-hidden", "16",
    "--ghn-slab-channels", "4", "--ghn-tile-bits", "3", "--ghn-steps", "1",
    "--training-steps", "2", "--training-batch-size", "6",
    "--training-checkpoint-every", "0", "--training-log-every", "1",
    "--search-candidates", "3", "--search-top-k", "1",
]


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv(SEED_VARIABLE, raising=False)


class TestUsage:

    def test_no_command(self):
        assert main([]) == EXIT_CONFIG

    def test_unknown_flag(self, tmp_path):
        assert main(["flops", "--out", str(tmp_path), "--ghn-layers", "3"]) \
            == EXIT_CONFIG

    def test_bad_value(self, tmp_path):
        assert main(["flops", "--out", str(tmp_path), "--ghn-steps", "x"]) \
            == EXIT_CONFIG

    def test_invalid_setting(self, tmp_path):
        argv = ["flops", "--out", str(tmp_path), "--search-top-k", "0"]
        assert main(argv) == EXIT_CONFIG

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "correlate" in capsys.readouterr().out


class TestFlops:

    def test_skeleton(self, tmp_path, capsys):
        argv = [
            "flops", "--out", str(tmp_path), "--space-repeat", "18",
            "--space-reductions", "6,12", "--space-eval-nodes", "4",
            "--task-size", "32",
        ]
        assert main(argv) == EXIT_OK
        header, rows = read_csv(tmp_path / "ghnx" / "standard" / "flops.csv")
        assert header == ["part", "flops"]
        parts = [r[0] for r in rows]
        assert parts[0] == "stem" and parts[-1] == "total"
        assert len([p for p in parts if p.startswith("block")]) == 18
        total = sum(int(r[1]) for r in rows[:-1])
        assert total == int(rows[-1][1])
        assert "parameters" in capsys.readouterr().out

    def test_arch_file(self, tmp_path):
        argv = ["flops", "--out", str(tmp_path), "--run-mode", "anytime",
                "--space-arch", str(DATA / "anytime_two_exits.json")]
        assert main(argv) == EXIT_OK
        _, rows = read_csv(tmp_path / "ghnx" / "anytime" / "flops.csv")
        parts = [r[0] for r in rows]
        assert "exit1" in parts and "exit2" in parts

    def test_missing_arch(self, tmp_path):
        argv = ["flops", "--out", str(tmp_path),
                "--space-arch", str(tmp_path / "none.json")]
        assert main(argv) == EXIT_RUNTIME


class TestRuns:

    def test_gen_data(self, tmp_path):
        argv = ["gen-data", "--out", str(tmp_path)] + TINY
        assert main(argv) == EXIT_OK
        first = read_json(tmp_path / "tiny" / "data" / "manifest.json")
        assert main(argv) == EXIT_OK
        again = read_json(tmp_path / "tiny" / "data" / "manifest.json")
        assert first["files"] == again["files"]
        assert first["files"]["train.ghnd"]["count"] == 24

    def test_missing_data(self, tmp_path):
        assert main(["train", "--out", str(tmp_path)] + TINY) == EXIT_RUNTIME

    def test_plotdata_without_results(self, tmp_path):
        assert main(["plotdata", "--out", str(tmp_path)]) == EXIT_RUNTIME

    def test_plotdata_echo(self, tmp_path):
        outdir = tmp_path / "ghnx" / "standard"
        outdir.mkdir(parents=True)
        write_json(outdir / "correlation.json",
                   {"pairs": [[0.1, 0.2], [0.3, 0.5]]})
        argv = ["plotdata", "--out", str(tmp_path), "--run-seed", "7"]
        assert main(argv) == EXIT_OK
        path = outdir / "plot-correlation.csv"
        with open(path) as f:
            echo = json.loads(f.readline()[2:])
        assert echo["source"] == "correlation"
        assert echo["run"]["seed"] == 7
        assert "stop_after" not in echo["training"]
        header, rows = read_csv(path)
        assert header == ["series", "x", "y"]
        assert rows == [["ghn", "0.1", "0.2"], ["ghn", "0.3", "0.5"]]

    @pytest.mark.slow
    def test_anytime_pipeline(self, tmp_path):
        base = ["--out", str(tmp_path), "--run-mode", "anytime"] + TINY
        for command in ("gen-data", "train", "search", "plotdata"):
            assert main([command] + base) == EXIT_OK, command
        outdir = tmp_path / "tiny" / "anytime"
        assert (outdir / "checkpoint.json").exists()
        assert len(read_jsonl(outdir / "train_log.jsonl")) == 2
        records = read_jsonl(outdir / "evaluations.jsonl")
        assert len(records) == 3
        assert all(r["true-acc"] is None for r in records)
        header, rows = read_csv(outdir / "plot-anytime.csv")
        assert header == ["series", "x", "y"]
        assert rows
