"""Tests for statistics, random search, correlation and ablation"""
import pytest

from ghnx.errors import InputError, StatisticsError
from ghnx.arch.graph import STANDARD, ANYTIME
from ghnx.arch.serialize import graph_hash
from ghnx.candidate.network import GhnSetup, MacroConfig
from ghnx.candidate.training import GhnTrainConfig
from ghnx.ghn.propagation import PropagationScheme
from ghnx.search import ablation
from ghnx.search.ablation import Experiment, AblationRow, settings, ablate
from ghnx.search.correlation import (
    Task, TruthCache, correlation_benchmark, top_half,
)
from ghnx.search.random_search import (
    random_search, compare_top_random, sample_candidates, rank,
)
from ghnx.search.stats import (
    pearson_r, pearson_p_value, anytime_auc, dedupe_points,
)
from ghnx.utils.records import read_csv


def _hash_score(g):
    """Deterministic, well-spread stand-in for an accuracy"""
    return int(graph_hash(g)[:6], 16) / float(16 ** 6)


class TestPearson:

    def test_identical(self):
        assert pearson_r([1, 2, 5], [1, 2, 5]) == pytest.approx(1.0)

    def test_negated(self):
        assert pearson_r([1, 2, 5], [-1, -2, -5]) == pytest.approx(-1.0)

    def test_closed_form(self):
        assert pearson_r([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9820, abs=1e-4)

    def test_zero_variance(self):
        with pytest.raises(StatisticsError):
            pearson_r([1, 1, 1], [1, 2, 3])

    def test_unpaired(self):
        with pytest.raises(InputError):
            pearson_r([1, 2, 3], [1, 2])

    def test_p_value(self):
        assert pearson_p_value(1.0, 10) == 0.0
        assert pearson_p_value(0.0, 10) == pytest.approx(0.5)
        assert pearson_p_value(0.6, 30) < 0.05
        with pytest.raises(StatisticsError):
            pearson_p_value(0.5, 2)


class TestAnytimeAuc:

    def test_constant(self):
        assert anytime_auc([(1, 0.7), (5, 0.7), (9, 0.7)]) == pytest.approx(0.7)

    def test_triangle(self):
        assert anytime_auc([(0, 0), (1, 1)]) == pytest.approx(0.5)

    def test_trapezoids(self):
        pts = [(0, 0.2), (2, 0.4), (4, 0.9)]
        assert anytime_auc(pts) == pytest.approx(0.4625)
        assert anytime_auc(pts[::-1]) == pytest.approx(0.4625)

    def test_collinear_midpoint(self):
        a = anytime_auc([(0, 0.2), (4, 0.6)])
        b = anytime_auc([(0, 0.2), (2, 0.4), (4, 0.6)])
        assert a == pytest.approx(b)

    def test_duplicate_flops(self):
        with pytest.raises(InputError, match="duplicate"):
            anytime_auc([(1, 0.1), (1, 0.2), (3, 0.5)])

    def test_single_point(self):
        with pytest.raises(InputError):
            anytime_auc([(1, 0.1)])

    def test_dedupe(self):
        assert dedupe_points([(3, 0.2), (1, 0.5), (3, 0.4)]) == \
            [(1, 0.5), (3, 0.4)]


class TestRandomSearch:

    @pytest.fixture
    def search(self, small_model, fb1, tiny_data):
        setup = GhnSetup(small_model, fb1)

        def run(count=4, k=2, threads=1, mode=STANDARD, **kwargs):
            return random_search(setup, mode, count, k, 5, tiny_data[1],
                                 MacroConfig(1, (), 4), 2, threads=threads,
                                 **kwargs)

        return run

    def test_too_few(self, search):
        with pytest.raises(InputError):
            search(count=2, k=3)

    def test_all_top(self, search):
        report = search(count=3, k=3)
        assert sorted(report.top_k) == sorted(c.hash for c in report.candidates)

    def test_ranked(self, search):
        report = search(count=5, k=2)
        scores = [c.predicted for c in report.candidates]
        assert scores == sorted(scores, reverse=True)
        assert report.top_k == [c.hash for c in report.candidates[:2]]
        assert report.config["seed"] == 5

    def test_deterministic(self, search):
        a, b = search(), search(threads=2)
        assert a.candidates == b.candidates
        assert a.top_k == b.top_k

    def test_anytime(self, anytime_model, fb1, tiny_data):
        setup = GhnSetup(anytime_model, fb1)
        report = random_search(setup, ANYTIME, 3, 1, 0, tiny_data[1],
                               MacroConfig(1, (), 4), 3, n_exits=1)
        for c in report.candidates:
            assert c.points[-1] == (c.flops, c.accuracy)
            if c.auc is not None:
                assert c.predicted == c.auc

    def test_sampling_streams(self):
        a = sample_candidates(STANDARD, 3, 1, 4)
        b = sample_candidates(STANDARD, 3, 1, 4, stream="correlation")
        assert [graph_hash(g) for g in a] != [graph_hash(g) for g in b]
        assert [graph_hash(g) for g in a] == \
            [graph_hash(g) for g in sample_candidates(STANDARD, 3, 1, 4)]

    def test_rank_ties(self, search):
        report = search(count=3, k=1)
        tied = [c._replace(predicted=0.5) for c in report.candidates]
        ordered = rank(tied)
        assert [c.hash for c in ordered] == sorted(c.hash for c in tied)

    def test_compare(self, search):
        report = search(count=4, k=2)
        calls = []

        def truth(c):
            calls.append(c.hash)
            return c.predicted

        cmp = compare_top_random(report, 2, truth, 0)
        assert [h for h, _ in cmp.top] == report.top_k
        assert cmp.margin == pytest.approx(cmp.top_mean - cmp.random_mean)
        assert cmp.margin >= 0.0
        assert len(calls) == len(set(calls))


class TestCorrelation:

    @pytest.fixture
    def task(self, tiny_data):
        return Task(STANDARD, tiny_data[0], tiny_data[1],
                    MacroConfig(1, (), 4), 3)

    def test_stub_surrogate(self, task):
        report = correlation_benchmark(
            None, 8, 0, 0, task, predictor=_hash_score, truth=_hash_score,
            surrogates={"zero": lambda g: 0.0, "same": _hash_score}
        )
        assert report.r_all == pytest.approx(1.0)
        assert report.r_top == pytest.approx(1.0)
        assert report.n == 8 and len(report.pairs) == 8
        assert report.p_value == pytest.approx(0.0, abs=1e-9)
        assert report.baselines[0][0] == "same"
        assert report.baselines[0][1] == pytest.approx(1.0)
        assert report.baselines[1] == ("zero", None, None)
        assert len(report.flops) == 8 and min(report.flops) > 0

    def test_too_few(self, task):
        with pytest.raises(InputError):
            correlation_benchmark(None, 1, 0, 0, task, predictor=_hash_score,
                                  truth=_hash_score)

    def test_constant_truth(self, task):
        with pytest.raises(StatisticsError):
            correlation_benchmark(None, 4, 0, 0, task, predictor=_hash_score,
                                  truth=lambda g: 0.5)

    def test_two_candidates(self, task):
        report = correlation_benchmark(None, 2, 0, 0, task,
                                       predictor=_hash_score,
                                       truth=_hash_score)
        assert report.r_top is None
        assert report.p_value is None

    def test_top_half(self):
        pairs = [(0.1, 0.5), (0.2, 0.9), (0.3, 0.5), (0.4, 0.1)]
        assert top_half(pairs) == [(0.2, 0.9), (0.1, 0.5)]

    def test_truth_cache(self):
        cache = TruthCache()
        g = sample_candidates(STANDARD, 1, 0, 3)[0]
        calls = []

        def compute():
            calls.append(1)
            return 0.25

        assert cache.get(g, 10, 0, compute) == 0.25
        assert cache.get(g, 10, 0, compute) == 0.25
        cache.get(g, 20, 0, compute)
        assert len(calls) == 2


class TestAblation:

    @pytest.fixture
    def base(self, small_dims):
        return Experiment(small_dims, PropagationScheme.forward_backward(1),
                          GhnTrainConfig(steps=1, batch_size=4, max_nodes=2))

    def test_settings(self, base):
        labels = [label for label, _ in settings("scheme", [1, 3], base)]
        assert labels == ["synchronous,T=1", "synchronous,T=3",
                          "forward-backward,T=1", "forward-backward,T=3"]
        nodes = settings("nodes", [3], base)
        assert nodes[0][0] == "nodes=3"
        assert nodes[0][1].train.max_nodes == 3
        stacked = settings("stacked", ["independent", "sp+pe"], base)
        assert [e.variant for _, e in stacked] == ["independent", "sp+pe"]

    def test_empty_grid(self, base):
        with pytest.raises(InputError):
            settings("steps", [], base)

    def test_bad_axis(self, base):
        with pytest.raises(InputError):
            settings("width", [1], base)

    def test_bad_variant(self, base):
        with pytest.raises(InputError):
            settings("stacked", ["shared"], base)

    def test_table(self, base, tmp_path, monkeypatch):
        def fake(exp, task, n, truth_steps, seed, cache, threads=1):
            return 0.1 * exp.scheme.steps + seed, None if seed else 0.5

        monkeypatch.setattr(ablation, "run_setting", fake)
        path = tmp_path / "ablation-steps.csv"
        rows = ablate("steps", [2], base, None, 4, 0, seeds=(0, 1),
                      path=path, echo={"seed": 0})
        assert rows == [AblationRow("T=2", pytest.approx(0.7), 0.5, 2)]
        header, table = read_csv(path)
        assert header == ["setting", "r_all", "r_top", "seeds"]
        assert len(table) == 1 and table[0][0] == "T=2"

    def test_undefined_correlation(self, base, tiny_data, monkeypatch):
        def flat(*args, **kwargs):
            raise StatisticsError("correlation is undefined for zero variance")

        monkeypatch.setattr(ablation, "correlation_benchmark", flat)
        task = Task(STANDARD, tiny_data[0], tiny_data[1],
                    MacroConfig(1, (), 4), 3)
        assert ablation.run_setting(base, task, 4, 0, 0, TruthCache()) == \
            (None, None)

    def test_undefined_setting_kept(self, base, tmp_path, monkeypatch):
        def fake(exp, task, n, truth_steps, seed, cache, threads=1):
            if exp.scheme.steps == 1:
                return None, None
            return 0.4, 0.2

        monkeypatch.setattr(ablation, "run_setting", fake)
        path = tmp_path / "ablation-steps.csv"
        rows = ablate("steps", [1, 2], base, None, 4, 0, path=path)
        assert rows[0] == AblationRow("T=1", None, None, 1)
        assert rows[1] == AblationRow("T=2", 0.4, 0.2, 1)
        _, table = read_csv(path)
        assert [r[0] for r in table] == ["T=1", "T=2"]
