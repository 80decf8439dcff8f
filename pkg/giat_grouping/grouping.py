##########################################################
# giat_grouping.grouping
#
#   Threshold decision + interaction data -> variable partition,
#   through the connected components of the interaction graph.
#
#   Released under the MIT License.
#
##########################################################

import json as _json
import logging as _logging
import pathlib as _pathlib
from dataclasses import dataclass as _dataclass

import numpy as _np

from .interaction import InteractionData
from .thresholds import Basis, Strategy, ThresholdDecision, Verdict, ZetaMatrix

logger = _logging.getLogger(__name__)

class BasisMismatchException(ValueError):
    "Raised when the indicator matrix does not match the decision basis."
    pass

@_dataclass(frozen=True)
class DecompositionResult:
    """Partition of the variables (0-based indices; reports are 1-based)."""
    nonsep_groups: tuple[tuple[int, ...], ...]
    sep_vars: tuple[int, ...]
    strategy: Strategy | None = None
    eps_used: float | str | dict | None = None

    @property
    def n(self) -> int:
        return len(self.sep_vars) + sum(len(g) for g in self.nonsep_groups)

    def to_dict(self) -> dict:
        return {
            "groups": [[i + 1 for i in g] for g in self.nonsep_groups],
            "separable": [i + 1 for i in self.sep_vars],
            "strategy": self.strategy.value if self.strategy is not None else None,
            "eps": self.eps_used,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return _json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "DecompositionResult":
        strategy = data.get("strategy")
        return cls(nonsep_groups=tuple(tuple(sorted(i - 1 for i in g)) for g in data.get("groups", [])),
                   sep_vars=tuple(sorted(i - 1 for i in data.get("separable", []))),
                   strategy=Strategy.parse(strategy) if strategy else None,
                   eps_used=data.get("eps"))

def save_result(result: DecompositionResult, path: str | _pathlib.Path, extra: dict | None = None) -> _pathlib.Path:
    """Write the result JSON; ``extra`` keys (verdict, fe_used, ...) are merged in."""
    p = _pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    document = result.to_dict()
    document.update(extra or {})
    p.write_text(_json.dumps(document, indent=2) + "\n", encoding="utf-8")
    return p

####################
#
# Pair classification
#
####################

def classify_pairs(data: InteractionData, zeta: ZetaMatrix | None, decision: ThresholdDecision) -> _np.ndarray:
    """Boolean adjacency: value > eps, on zeta (Indicator basis) or tau (RawTau basis).

    Raises:
        BasisMismatchException: zeta given for a RawTau decision or missing for an Indicator one.

    Returns:
        ndarray: symmetric boolean n x n matrix with a False diagonal.
    """
    if (zeta is not None) != (decision.basis is Basis.INDICATOR):
        raise BasisMismatchException(f"basis {decision.basis.value} with zeta {'present' if zeta is not None else 'absent'}")
    n = data.n
    match decision.verdict:
        case Verdict.FULLY_SEPARABLE:
            return _np.zeros((n, n), dtype=bool)
        case Verdict.FULLY_NONSEPARABLE:
            adjacency = _np.ones((n, n), dtype=bool)
            _np.fill_diagonal(adjacency, False)
            return adjacency
    values = zeta.values if zeta is not None else data.gamma
    eps = decision.pair_eps if decision.pair_eps is not None else decision.scalar_eps
    adjacency = values > eps
    # mirror the upper triangle so a per-pair threshold cannot break symmetry
    upper = _np.triu(adjacency, 1)
    adjacency = upper | upper.T
    return adjacency

####################
#
# Connected components
#
####################

class UnionFind:
    """Disjoint sets over 0..size-1 with path compression and union by size."""

    def __init__(self, size: int):
        self.size = size
        self.parents = list(range(size))
        self._sizes = [1] * size
        self.num_components = size

    def find(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        # compress path taken so all elements point to root directly
        while elem != root:
            self.parents[elem], elem = root, self.parents[elem]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._sizes[ra] < self._sizes[rb]:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self._sizes[ra] += self._sizes[rb]
        self.num_components -= 1

    def components(self) -> list[list[int]]:
        members: dict[int, list[int]] = {}
        for i in range(self.size):
            members.setdefault(self.find(i), []).append(i)
        return sorted(members.values())

def connected_components(adjacency: _np.ndarray, decision: ThresholdDecision | None = None) -> DecompositionResult:
    """Groups are the components with two or more members; singletons are separable.

    Args:
        adjacency (ndarray): symmetric boolean matrix.
        decision (ThresholdDecision | None, optional): recorded on the result.

    Returns:
        DecompositionResult: the partition.
    """
    adjacency = _np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    uf = UnionFind(n)
    for p, q in zip(*_np.nonzero(_np.triu(adjacency, 1))):
        uf.union(int(p), int(q))
    groups, separable = [], []
    for component in uf.components():
        if len(component) >= 2:
            groups.append(tuple(component))
        else:
            separable.extend(component)
    result = DecompositionResult(
        nonsep_groups=tuple(groups),
        sep_vars=tuple(sorted(separable)),
        strategy=decision.strategy if decision is not None else None,
        eps_used=decision.eps_record() if decision is not None else None,
    )
    logger.debug("components: %d groups, %d separable", len(groups), len(separable))
    return result

cc = connected_components

def decompose(data: InteractionData, decision: ThresholdDecision, zeta: ZetaMatrix | None = None) -> DecompositionResult:
    """classify_pairs followed by connected_components."""
    return connected_components(classify_pairs(data, zeta, decision), decision)
