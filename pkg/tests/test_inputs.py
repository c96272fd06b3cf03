"""Tests for inputs"""
import pathlib

import pytest

from ghnx import inputs
from ghnx.errors import ConfigError
from ghnx.candidate.network import MacroConfig
from ghnx.ghn.propagation import PropagationScheme


class TestRunInputs:

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="run.mode must be one of"):
            inputs.run.RunSpec(mode="cifar")

        with pytest.raises(ConfigError, match="run.seed"):
            inputs.run.RunSpec(seed=-1)

        with pytest.raises(ConfigError, match="run.threads"):
            inputs.run.RunSpec(threads=0)

        with pytest.raises(ConfigError, match="run.name"):
            inputs.run.RunSpec(name="a/b")

    def test_paths(self):
        cfg = inputs.run.RunConfig(
            inputs.run.RunSpec(name="demo", mode="anytime", outdir="out"),
            inputs.space.SpaceConfig(),
            inputs.ghn.GhnConfig(),
            inputs.task.TaskConfig(),
            inputs.training.TrainConfig(),
            inputs.search.SearchConfig(),
        )
        assert cfg.seed == 0
        assert cfg.mode == "anytime"
        assert cfg.output_directory == pathlib.Path("out/demo/anytime")
        assert cfg.data_directory == pathlib.Path("out/demo/data")
        assert cfg.log_file.name == "run.log"
        assert cfg.checkpoint_file.parent == cfg.output_directory


class TestSpaceInputs:

    def test_defaults(self):
        space = inputs.space.SpaceConfig()
        assert space.train_nodes == 7
        assert space.eval_nodes == 17
        assert space.macro == MacroConfig(1, (), 16)

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="space.train_nodes"):
            inputs.space.SpaceConfig(train_nodes=0)

        with pytest.raises(ConfigError, match="outside the block positions"):
            inputs.space.SpaceConfig(repeat=4, reductions=(2, 5))

    def test_skeleton(self):
        space = inputs.space.SpaceConfig(repeat=18, reductions=[6, 12])
        assert space.macro.reductions == (6, 12)


class TestGhnInputs:

    def test_propagation(self):
        ghn = inputs.ghn.GhnConfig(scheme="synchronous", steps=3)
        assert ghn.propagation == PropagationScheme.synchronous(3)
        dims = ghn.dims("standard")
        assert dims.hidden == 32 and dims.mode == "standard"

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="ghn.scheme"):
            inputs.ghn.GhnConfig(scheme="async")

        with pytest.raises(ConfigError, match="ghn.variant"):
            inputs.ghn.GhnConfig(variant="shared")

        with pytest.raises(ConfigError, match="ghn.delivery"):
            inputs.ghn.GhnConfig(delivery="never")

        with pytest.raises(ConfigError, match="ghn.steps"):
            inputs.ghn.GhnConfig(steps=-1)


class TestTaskInputs:

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="task.num_classes"):
            inputs.task.TaskConfig(num_classes=1)

        with pytest.raises(ConfigError, match="task.size"):
            inputs.task.TaskConfig(size=1)

        with pytest.raises(ConfigError, match="task.noise"):
            inputs.task.TaskConfig(noise=-0.1)


class TestTrainingInputs:

    def test_schedule(self):
        space = inputs.space.SpaceConfig(train_nodes=5, n_exits=2)
        training = inputs.training.TrainConfig(steps=40, random_nodes=True)
        sched = training.schedule(space, "anytime", 9)
        assert sched.steps == 40
        assert sched.max_nodes == 5
        assert sched.random_nodes
        assert sched.n_exits == 2
        assert sched.seed == 9
        assert training.schedule(space, "standard", 9).n_exits == 1

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="training.lr"):
            inputs.training.TrainConfig(lr=0.0)

        with pytest.raises(ConfigError, match="training.milestones"):
            inputs.training.TrainConfig(milestones=(0.5, 1.5))

        with pytest.raises(ConfigError, match="training.batch_size"):
            inputs.training.TrainConfig(batch_size=0)


class TestSearchInputs:

    def test_check_inputs(self):

        with pytest.raises(ConfigError, match="must be at least"):
            inputs.search.SearchConfig(candidates=5, top_k=10)

        with pytest.raises(ConfigError, match="search.correlation_n"):
            inputs.search.SearchConfig(correlation_n=1)

        with pytest.raises(ConfigError, match="search.ablate_axis"):
            inputs.search.SearchConfig(ablate_axis="width")

    def test_grid(self):
        search = inputs.search.SearchConfig(ablate_axis="steps",
                                            ablate_grid=("1", 3))
        assert search.grid == (1, 3)
        stacked = inputs.search.SearchConfig(ablate_axis="stacked",
                                             ablate_grid=["pe", "sp+pe"])
        assert stacked.grid == ("pe", "sp+pe")
        with pytest.raises(ConfigError, match="integers"):
            inputs.search.SearchConfig(ablate_axis="nodes",
                                       ablate_grid=["pe"]).grid
