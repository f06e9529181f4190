"""Tests for experiment orchestration"""

import math

import pytest

from capmimo.core.channel import build_channel
from capmimo.core.errors import InvalidConfigError
from capmimo.core.experiment import ScenarioRunner, design_patterns, run_experiment, sweep_aperture
from capmimo.core.models import Scheme
from capmimo.core.storage import MemoryResultStore

from .factories import small_config


class TestRunExperiment:
    """Test suite for single-scheme runs"""

    def setup_method(self):
        self.config = small_config()
        self.channel = build_channel(self.config)

    def test_pdm(self):
        result = run_experiment(self.config, "pdm", channel=self.channel)
        assert result.scheme == "pdm"
        assert result.sum_rate == math.fsum(result.per_user_rates)
        assert len(result.per_user_rates) == 2
        assert result.iterations == len(result.trace) > 0
        assert result.area_m2 == pytest.approx(0.0625)

    def test_wdm_has_no_iterations(self):
        result = run_experiment(self.config, Scheme.WDM, seed=4, channel=self.channel)
        assert result.scheme == "wdm"
        assert result.iterations == 0
        assert result.trace == []
        assert result.seed == 4
        assert result.sum_rate > 0

    def test_interference_free_bounds_pdm(self):
        pdm = run_experiment(self.config, "pdm", seed=2, channel=self.channel)
        bound = run_experiment(self.config, "ifree", seed=2, channel=self.channel)
        assert bound.scheme == "interference-free"
        assert bound.sum_rate >= pdm.sum_rate

    def test_pdm_beats_wdm(self):
        pdm = run_experiment(self.config, "pdm", channel=self.channel)
        wdm = run_experiment(self.config, "wdm", channel=self.channel)
        assert pdm.sum_rate > wdm.sum_rate

    def test_unknown_scheme(self):
        with pytest.raises(InvalidConfigError, match="Unknown scheme"):
            run_experiment(self.config, "tdm", channel=self.channel)

    def test_design_patterns(self):
        state, channel = design_patterns(self.config, channel=self.channel)
        assert channel is self.channel
        assert state.patterns.shape == (2, 64, 3)


class TestSweep:
    """Test suite for aperture sweeps"""

    def setup_method(self):
        self.config = small_config()

    def test_row_count(self):
        results = sweep_aperture(self.config, [0.0625, 0.09], seeds=[0, 1])
        assert len(results) == 2 * 3 * 2
        assert {r.scheme for r in results} == {"pdm", "wdm", "interference-free"}
        assert sorted({r.area_m2 for r in results}) == pytest.approx([0.0625, 0.09])

    def test_base_area_reproduces_single_run(self):
        swept = sweep_aperture(self.config, [0.0625], seeds=[0])
        single = run_experiment(self.config, "pdm")
        assert swept[0].scheme == "pdm"
        assert swept[0].sum_rate == single.sum_rate

    def test_each_seed_matches_reseeded_config(self):
        swept = sweep_aperture(self.config, [0.0625], seeds=[3])
        single = run_experiment(self.config.with_seed(3), "pdm")
        assert swept[0].seed == 3
        assert swept[0].sum_rate == single.sum_rate
        assert swept[0].trace == single.trace

    def test_rejects_negative_seed(self):
        with pytest.raises(InvalidConfigError, match="seed"):
            sweep_aperture(self.config, [0.0625], seeds=[-1])

    def test_bound_holds_per_seed(self):
        results = sweep_aperture(self.config, [0.0625], seeds=[0, 1])
        for seed in (0, 1):
            by_scheme = {r.scheme: r.sum_rate for r in results if r.seed == seed}
            assert by_scheme["interference-free"] >= by_scheme["pdm"]

    def test_empty_sweep(self):
        assert sweep_aperture(self.config, []) == []

    def test_rejects_non_positive_area(self):
        with pytest.raises(InvalidConfigError):
            sweep_aperture(self.config, [0.25, -1.0])


class TestScenarioRunner:
    """Test suite for the store-backed runner"""

    def setup_method(self):
        self.store = MemoryResultStore()
        self.runner = ScenarioRunner(small_config(), self.store)

    def test_results_are_stored(self):
        self.runner.run("wdm")
        self.runner.run("pdm", seed=1)
        assert [r.scheme for r in self.store.all()] == ["wdm", "pdm"]
        assert self.runner.store.get("pdm", 1) is not None

    def test_channel_is_cached(self):
        assert self.runner.channel is self.runner.channel

    def test_sweep_stats(self):
        self.runner.sweep([0.0625], seeds=[0, 1])
        stats = self.runner.get_stats()
        assert set(stats) == {"0.0625/pdm", "0.0625/wdm", "0.0625/interference-free"}
        assert stats["0.0625/wdm"]["min"] == stats["0.0625/wdm"]["max"]
