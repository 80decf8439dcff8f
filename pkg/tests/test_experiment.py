"""Tests for giat_grouping.experiment: configuration, seeds and the strategy pipeline."""

from __future__ import annotations

import dataclasses
import json

import pytest

from giat_grouping.bench_suite import ProblemSpec
from giat_grouping.experiment import (ALL_STRATEGIES, ConfigException, ExperimentConfig, ProblemEntry,
                                      desk_suite_config, load_config, result_path, run_experiment, run_problem,
                                      write_comparison, write_problem_results)
from giat_grouping.interaction import expected_fe
from giat_grouping.thresholds import Strategy, Verdict
from giat_grouping.utilities import derive_seed


# ── Configuration ──────────────────────────────────────────────────────


class TestExperimentConfig:

    def test_needs_a_problem(self):
        with pytest.raises(ConfigException):
            ExperimentConfig(problems=())

    def test_needs_a_strategy(self, small_config):
        with pytest.raises(ConfigException):
            dataclasses.replace(small_config, strategies=())

    def test_duplicate_names(self):
        entry = ProblemEntry("p", ProblemSpec(separable_dims=4))
        with pytest.raises(ConfigException, match="duplicate"):
            ExperimentConfig(problems=(entry, entry))

    def test_duplicate_strategies(self, small_config):
        with pytest.raises(ConfigException, match="duplicate strategies"):
            dataclasses.replace(small_config, strategies=(Strategy.FT, Strategy.FT))

    @pytest.mark.parametrize("field, value", [("ft_eps", 0.0), ("fst_alpha", -1.0), ("fst_k", 0), ("workers", 0)])
    def test_invalid_parameters(self, small_config, field, value):
        with pytest.raises(ConfigException):
            dataclasses.replace(small_config, **{field: value})

    def test_seed_derivation(self, small_config):
        assert small_config.seed_for("example1_imbalanced") == 0
        assert small_config.seed_for("separable_sphere") == derive_seed(5, 1)
        assert small_config.seed_for("two_group") == derive_seed(5, 2)

    def test_unknown_problem(self, small_config):
        with pytest.raises(ConfigException, match="unknown problem"):
            small_config.problem("f99")

    def test_overrides(self, small_config):
        updated = small_config.with_overrides(output_dir="elsewhere", master_seed=9, strategies=["giat", "FT"],
                                              problems=["two_group"], workers=2)
        assert updated.output_dir == "elsewhere"
        assert updated.strategies == (Strategy.GIAT, Strategy.FT)
        assert [p.name for p in updated.problems] == ["two_group"]
        assert updated.seed_for("two_group") == derive_seed(9, 2)
        assert updated.workers == 2

    def test_unknown_strategy_override(self, small_config):
        with pytest.raises(ConfigException):
            small_config.with_overrides(strategies=["DG2"])

    def test_dict_round_trip(self, small_config):
        assert ExperimentConfig.from_dict(json.loads(json.dumps(small_config.to_dict()))) == small_config

    def test_from_dict_defaults(self):
        config = ExperimentConfig.from_dict({"problems": [{"name": "s", "spec": {"separable_dims": 4}}]})
        assert config.strategies == ALL_STRATEGIES
        assert (config.ft_eps, config.fst_alpha, config.fst_k) == (1e-3, 1e-10, 10)

    @pytest.mark.parametrize("document", [
        {"problems": [{"spec": {"separable_dims": 4}}]},
        {"problems": [{"name": "s", "spec": {"separable_dims": 4, "rotation": True}}]},
        {"problems": [{"name": "s", "spec": {"separable_dims": 4}}], "strategies": ["DG2"]},
        {"problems": [{"name": "s", "spec": {"separable_dims": 4}}], "scheme": {"delta_rule": "Random"}},
    ])
    def test_invalid_documents(self, document):
        with pytest.raises(ConfigException):
            ExperimentConfig.from_dict(document)

    def test_load_config_malformed(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigException):
            load_config(path)

    def test_desk_suite(self):
        config = desk_suite_config()
        assert len(config.problems) == 10
        assert config.strategies == ALL_STRATEGIES
        names = [p.name for p in config.problems]
        assert "ackley_known_failure" in names and "example1_imbalanced" in names


# ── Pipeline ───────────────────────────────────────────────────────────


class TestRunProblem:

    def test_example1_strategies(self, small_config):
        run = run_problem(small_config, "example1_imbalanced")
        outcomes = {r.strategy: r for r in run.runs}
        assert list(outcomes) == list(ALL_STRATEGIES)
        assert outcomes[Strategy.GIAT].report.exact
        assert outcomes[Strategy.CRET].report.exact
        assert not outcomes[Strategy.FT].report.exact

    def test_evaluation_accounting(self, small_config):
        run = run_problem(small_config, "two_group")
        n = run.instance.n
        for outcome in run.runs:
            extra = small_config.fst_k if outcome.strategy is Strategy.FST else 0
            assert outcome.fe_used == expected_fe(n) + extra
        assert run.instance.fe_count == expected_fe(n) + small_config.fst_k

    def test_fully_separable_verdict(self, small_config):
        outcome = run_problem(small_config, "separable_sphere", strategies=(Strategy.GIAT,)).runs[0]
        assert outcome.decision.verdict is Verdict.FULLY_SEPARABLE
        assert outcome.result.sep_vars == tuple(range(10))
        assert outcome.report.exact

    def test_giat_keeps_indicator_arrays(self, small_config):
        outcome = run_problem(small_config, "two_group", strategies=(Strategy.GIAT,)).runs[0]
        assert outcome.zeta is not None
        assert outcome.z.size == 66

    def test_threaded_matches_serial(self, small_config):
        serial = run_experiment(small_config)
        threaded = run_experiment(dataclasses.replace(small_config, workers=3))
        assert [r.name for r in threaded] == [r.name for r in serial]
        for a, b in zip(serial, threaded):
            assert [x.result for x in a.runs] == [x.result for x in b.runs]


class TestOutputs:

    def test_problem_results(self, small_config, tmp_path):
        run = run_problem(small_config, "example1_imbalanced", strategies=(Strategy.GIAT,))
        paths = write_problem_results(run, tmp_path)
        assert paths == [result_path(tmp_path, "example1_imbalanced", Strategy.GIAT)]
        document = json.loads(paths[0].read_text(encoding="utf-8"))
        assert document["groups"] == [[1, 2], [3, 4]]
        assert document["fe_used"] == 11
        assert document["verdict"] == "Partial"
        assert document["exact"] is True

    def test_comparison_files(self, small_config, tmp_path):
        comparison, summary = write_comparison(run_experiment(small_config), tmp_path)
        assert len(comparison.read_text(encoding="utf-8").splitlines()) == 1 + 3 * 4
        assert len(summary.read_text(encoding="utf-8").splitlines()) == 1 + 4
