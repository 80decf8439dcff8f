"""Tests for giat_grouping.evaluation: accuracy scoring, CSV rows and the indicator distribution."""

from __future__ import annotations

import math

import numpy as np
import pytest

from giat_grouping.bench_suite import (DimensionMismatchException, GroupingTruth, build_problem,
                                       category_spec, ground_truth)
from giat_grouping.evaluation import (COMPARISON_HEADER, AccuracyReport, ComparisonRow, EmptyDistributionException,
                                      append_comparison_row, dump_distribution, gap_separates, pair_labels, score,
                                      summarise, truth_as_result, write_comparison_csv, write_distribution_csv,
                                      write_summary_csv)
from giat_grouping.grouping import DecompositionResult
from giat_grouping.interaction import build_interaction_data
from giat_grouping.thresholds import giat_threshold, quotient_differences

EXAMPLE1_TRUTH = GroupingTruth(nonsep_groups=((0, 1), (2, 3)), sep_vars=())


# ── Scoring ────────────────────────────────────────────────────────────


class TestScore:

    def test_perfect_match(self):
        report = score(truth_as_result(EXAMPLE1_TRUTH), EXAMPLE1_TRUTH)
        assert report == AccuracyReport(0, 4, 2, True)
        assert report.accuracy == 1

    def test_all_singletons(self):
        result = DecompositionResult(nonsep_groups=(), sep_vars=(0, 1, 2, 3))
        assert score(result, EXAMPLE1_TRUTH) == AccuracyReport(0, 0, 0, False)

    def test_merged_group(self):
        """Variables captured but grouped wrongly."""
        result = DecompositionResult(nonsep_groups=((0, 1, 2, 3),), sep_vars=())
        report = score(result, EXAMPLE1_TRUTH)
        assert report == AccuracyReport(0, 4, 1, False)
        assert report.accuracy == 0

    def test_listing_order_irrelevant(self):
        result = DecompositionResult(nonsep_groups=((3, 2), (1, 0)), sep_vars=())
        assert score(result, EXAMPLE1_TRUTH).exact

    def test_separable_function_grouped_whole(self):
        truth = GroupingTruth(nonsep_groups=(), sep_vars=tuple(range(10)))
        result = DecompositionResult(nonsep_groups=(tuple(range(10)),), sep_vars=())
        assert score(result, truth) == AccuracyReport(0, 0, 1, False)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchException):
            score(DecompositionResult(nonsep_groups=(), sep_vars=(0, 1)), EXAMPLE1_TRUTH)

    @pytest.mark.parametrize("seed", range(5))
    def test_truth_scores_exact(self, seed):
        truth = ground_truth(build_problem(category_spec("multi_group", dim=30, groups=3, group_size=4), seed))
        assert score(truth_as_result(truth), truth).exact

    def test_pair_labels(self):
        labels = pair_labels(EXAMPLE1_TRUTH)
        assert labels[0, 1] and labels[3, 2]
        assert not labels[0, 2] and not labels[1, 1]
        np.testing.assert_array_equal(labels, labels.T)


# ── Comparison CSV ─────────────────────────────────────────────────────


class TestComparisonRows:

    ROWS = [
        ComparisonRow("f1", "FT", AccuracyReport(0, 2, 1, False), 11),
        ComparisonRow("f1", "GIAT", AccuracyReport(0, 4, 2, True), 11),
        ComparisonRow("f2", "GIAT", AccuracyReport(10, 0, 0, True), 56),
    ]

    def test_csv_row_has_six_columns(self):
        assert self.ROWS[1].csv_row() == ("f1", "GIAT", 0, 4, 2, 1)
        assert len(COMPARISON_HEADER) == 6

    def test_write_comparison_csv(self, tmp_path):
        path = write_comparison_csv(self.ROWS, tmp_path / "comparison.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "function_id,strategy,captured_sep,captured_nonsep,formed_groups,accuracy"
        assert lines[1:] == ["f1,FT,0,2,1,0", "f1,GIAT,0,4,2,1", "f2,GIAT,10,0,0,1"]

    def test_append_row(self, tmp_path):
        path = tmp_path / "comparison.csv"
        append_comparison_row(self.ROWS[0], path)
        append_comparison_row(self.ROWS[1], path)
        assert len(path.read_text(encoding="utf-8").splitlines()) == 3

    def test_summarise(self):
        assert dict(summarise(self.ROWS)) == {"FT": (0, 1), "GIAT": (2, 2)}
        assert list(summarise(self.ROWS)) == ["FT", "GIAT"]

    def test_write_summary_csv(self, tmp_path):
        lines = write_summary_csv(self.ROWS, tmp_path / "summary.csv").read_text(encoding="utf-8").splitlines()
        assert lines == ["strategy,accuracy_sum,problems", "FT,0,1", "GIAT,2,2"]


# ── Indicator distribution ─────────────────────────────────────────────


class TestDumpDistribution:

    def test_zero_rule_case(self):
        z = np.array([0.0, 0.0, 2.0, 2.0])
        dump = dump_distribution(z, quotient_differences(z))
        assert dump.gap_index == 1
        assert dump.gap_row == 3
        assert dump.gap_ratio == math.inf

    def test_largest_quotient(self):
        z = np.array([1e-9, 2e-9, 0.8, 1.0])
        dump = dump_distribution(z, quotient_differences(z))
        assert dump.gap_index == 1
        assert dump.gap_ratio == pytest.approx(4e8 / 2)
        assert dump.gap_lower == 2e-9

    def test_threshold_locates_gap(self):
        z = np.array([1e-9, 2e-9, 0.8, 1.0])
        assert dump_distribution(z, quotient_differences(z), eps=2e-9).gap_index == 1

    def test_single_element(self):
        with pytest.raises(EmptyDistributionException):
            dump_distribution(np.array([1.0]), np.zeros(0))

    def test_mismatched_lengths(self):
        with pytest.raises(EmptyDistributionException):
            dump_distribution(np.array([1.0, 2.0, 3.0]), np.zeros(1))

    def test_gap_separates_example1(self, example1_balanced):
        decision, zeta, z, v = giat_threshold(build_interaction_data(example1_balanced))
        dump = dump_distribution(z, v, decision.scalar_eps)
        assert dump.gap_ratio == math.inf
        assert gap_separates(dump, zeta, EXAMPLE1_TRUTH)

    def test_gap_does_not_separate_wrong_truth(self, example1_balanced):
        decision, zeta, z, v = giat_threshold(build_interaction_data(example1_balanced))
        wrong = GroupingTruth(nonsep_groups=((0, 2),), sep_vars=(1, 3))
        assert not gap_separates(dump_distribution(z, v, decision.scalar_eps), zeta, wrong)

    def test_write_distribution_csv(self, tmp_path):
        z = np.array([0.0, 0.0, 2.0, 2.0])
        dump = dump_distribution(z, quotient_differences(z))
        lines = write_distribution_csv(dump, tmp_path / "d.csv").read_text(encoding="utf-8").splitlines()
        assert lines == ["index,Z,V", "1,0.0,", "2,0.0,0.0", "3,2.0,0.0", "4,2.0,1.0",
                         "# gap_index=3", "# gap_ratio=inf"]
