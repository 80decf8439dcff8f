##########################################################
# giat_grouping.evaluation
#
#   Decomposition accuracy against ground truth, and the
#   indicator-gap distribution of the sorted zeta array.
#
#   Released under the MIT License.
#
##########################################################

import logging as _logging
import math as _math
import pathlib as _pathlib
from collections import OrderedDict as _OrderedDict
from dataclasses import dataclass as _dataclass
from typing import Iterable as _Iterable

import numpy as _np

from .bench_suite import DimensionMismatchException, GroupingTruth
from .grouping import DecompositionResult
from .thresholds import ZetaMatrix
from .utilities import append_csv_row, format_float, write_csv

logger = _logging.getLogger(__name__)

COMPARISON_HEADER = ("function_id", "strategy", "captured_sep", "captured_nonsep", "formed_groups", "accuracy")
DISTRIBUTION_HEADER = ("index", "Z", "V")
SUMMARY_HEADER = ("strategy", "accuracy_sum", "problems")

class EmptyDistributionException(ValueError):
    "Raised when the indicator array has fewer than two entries."
    pass

####################
#
# Accuracy
#
####################

@_dataclass(frozen=True)
class AccuracyReport:
    captured_sep_vars: int
    captured_nonsep_vars: int
    formed_nonsep_groups: int
    exact: bool

    @property
    def accuracy(self) -> int:
        return int(self.exact)

def score(result: DecompositionResult, truth: GroupingTruth) -> AccuracyReport:
    """Table-style accuracy of a decomposition.

    A truly separable variable is captured only if reported separable; a
    truly nonseparable variable only if reported inside some group. The
    result is exact when groups (as a set of sets) and separable variables
    both match.

    Raises:
        DimensionMismatchException: result and truth cover different n.
    """
    if result.n != truth.n:
        raise DimensionMismatchException(f"result covers {result.n} variables, truth {truth.n}")
    reported_grouped = {i for g in result.nonsep_groups for i in g}
    truly_grouped = {i for g in truth.nonsep_groups for i in g}
    captured_sep = len(set(result.sep_vars) & set(truth.sep_vars))
    captured_nonsep = len(reported_grouped & truly_grouped)
    exact = ({frozenset(g) for g in result.nonsep_groups} == {frozenset(g) for g in truth.nonsep_groups}
             and set(result.sep_vars) == set(truth.sep_vars))
    return AccuracyReport(captured_sep, captured_nonsep, len(result.nonsep_groups), exact)

def truth_as_result(truth: GroupingTruth) -> DecompositionResult:
    return DecompositionResult(nonsep_groups=truth.nonsep_groups, sep_vars=truth.sep_vars)

def pair_labels(truth: GroupingTruth) -> _np.ndarray:
    """Boolean n x n matrix, True where both variables share a ground-truth group."""
    labels = _np.zeros((truth.n, truth.n), dtype=bool)
    for group in truth.nonsep_groups:
        idx = _np.array(group)
        labels[_np.ix_(idx, idx)] = True
    _np.fill_diagonal(labels, False)
    return labels

@_dataclass(frozen=True)
class ComparisonRow:
    function_id: str
    strategy: str
    report: AccuracyReport
    fe_used: int

    def csv_row(self) -> tuple:
        r = self.report
        return (self.function_id, self.strategy, r.captured_sep_vars, r.captured_nonsep_vars,
                r.formed_nonsep_groups, r.accuracy)

def write_comparison_csv(rows: _Iterable[ComparisonRow], path: str | _pathlib.Path) -> _pathlib.Path:
    return write_csv(path, COMPARISON_HEADER, (row.csv_row() for row in rows))

def append_comparison_row(row: ComparisonRow, path: str | _pathlib.Path) -> _pathlib.Path:
    return append_csv_row(path, COMPARISON_HEADER, row.csv_row())

def summarise(rows: _Iterable[ComparisonRow]) -> "_OrderedDict[str, tuple[int, int]]":
    """Accuracy sum and problem count per strategy, in first-seen order."""
    totals: _OrderedDict[str, tuple[int, int]] = _OrderedDict()
    for row in rows:
        hits, count = totals.get(row.strategy, (0, 0))
        totals[row.strategy] = (hits + row.report.accuracy, count + 1)
    return totals

def write_summary_csv(rows: _Iterable[ComparisonRow], path: str | _pathlib.Path) -> _pathlib.Path:
    return write_csv(path, SUMMARY_HEADER, ((s, hits, count) for s, (hits, count) in summarise(rows).items()))

####################
#
# Indicator distribution
#
####################

@_dataclass(frozen=True)
class DistributionDump:
    """Sorted indicators, quotient differences and the located gap.

    ``gap_index`` is 0-based into V: the gap lies between Z[gap_index] and
    Z[gap_index + 1]. ``gap_row`` is the matching 1-based CSV row.
    """
    z: _np.ndarray
    v: _np.ndarray
    gap_index: int
    gap_ratio: float

    @property
    def gap_row(self) -> int:
        return self.gap_index + 2

    @property
    def gap_lower(self) -> float:
        return float(self.z[self.gap_index])

def _zero_transition(z: _np.ndarray) -> int | None:
    zeros = _np.flatnonzero(z == 0)
    if zeros.size == 0 or zeros[-1] == z.size - 1:
        return None
    return int(zeros[-1])

def dump_distribution(z: _np.ndarray, v: _np.ndarray, eps: float | None = None) -> DistributionDump:
    """Locate the gap in a sorted indicator array.

    With ``eps`` (the GIAT threshold) the gap is the boundary just above
    eps. Without it, the gap is argmax V, except when no quotient exceeds 1
    and a zero block exists, in which case it is the last-zero to
    first-nonzero transition. The gap ratio compares the gap's quotient to
    the largest other defined quotient (Z[k] != 0); a gap starting at zero
    has an infinite ratio.

    Raises:
        EmptyDistributionException: fewer than two entries, or V not of length len(Z) - 1.
    """
    z = _np.asarray(z, dtype=float)
    v = _np.asarray(v, dtype=float)
    if z.size < 2:
        raise EmptyDistributionException(f"need at least two indicators, got {z.size}")
    if v.size != z.size - 1:
        raise EmptyDistributionException(f"V has {v.size} entries, expected {z.size - 1}")

    transition = _zero_transition(z)
    if eps is not None:
        k = int(_np.searchsorted(z, eps, side="right")) - 1
        k = min(max(k, 0), z.size - 2)
    elif v.max() <= 1.0 and transition is not None:
        k = transition
    else:
        k = int(_np.argmax(v))

    if z[k] == 0:
        ratio = _math.inf if z[k + 1] > 0 else 1.0
    else:
        defined = z[:-1] != 0
        defined[k] = False
        others = v[defined]
        second = float(others.max()) if others.size else 0.0
        ratio = float(v[k]) / second if second > 0 else _math.inf
    return DistributionDump(z=z, v=v, gap_index=k, gap_ratio=ratio)

def gap_separates(dump: DistributionDump, indicators: ZetaMatrix, truth: GroupingTruth) -> bool:
    """True when every same-group pair lies above the gap and every other pair at or below it."""
    labels = pair_labels(truth)
    upper = _np.triu_indices(indicators.n, 1)
    values, nonseparable = indicators.values[upper], labels[upper]
    threshold = dump.gap_lower
    return bool(_np.all(values[nonseparable] > threshold) and _np.all(values[~nonseparable] <= threshold))

def write_distribution_csv(dump: DistributionDump, path: str | _pathlib.Path) -> _pathlib.Path:
    """index, Z, V columns; row i holds Z(i) and V(i) = Z(i) / Z(i - 1) (blank for i = 1)."""
    rows = [(1, format_float(dump.z[0]), "")]
    rows.extend((i + 2, format_float(dump.z[i + 1]), format_float(dump.v[i])) for i in range(dump.v.size))
    footer = (f"gap_index={dump.gap_row}", f"gap_ratio={format_float(dump.gap_ratio)}")
    return write_csv(path, DISTRIBUTION_HEADER, rows, footer)
