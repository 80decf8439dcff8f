##########################################################
# giat_grouping.interaction
#
#   Forward-difference interaction structure: tau, roundoff
#   bounds e_inf / e_sup and max |delta| for every variable pair.
#
#   Released under the MIT License.
#
##########################################################

import enum as _enum
import logging as _logging
import math as _math
import pathlib as _pathlib
from concurrent.futures import ThreadPoolExecutor as _ThreadPoolExecutor
from dataclasses import dataclass as _dataclass

import numpy as _np

from .bench_suite import ProblemInstance, evaluate
from .utilities import format_float, write_csv

logger = _logging.getLogger(__name__)

# Half the unit roundoff of IEEE double precision
MU = float(_np.finfo(float).eps) / 2.0

PAIR_CSV_HEADER = ("p", "q", "tau", "e_inf", "e_sup", "d")

class RoundoffConstantException(ValueError):
    "Raised when k * mu >= 1, so the roundoff constant is undefined."
    pass

class InvalidPairException(IndexError):
    "Raised for out-of-range or identical pair indices."
    pass

def gamma_constant(k: float, mu: float = MU) -> float:
    """Roundoff constant gamma_k = k * mu / (1 - k * mu).

    Args:
        k (float): non-negative multiplier, typically 2 or sqrt(n).
        mu (float, optional): half the machine unit roundoff. Defaults to MU.

    Raises:
        RoundoffConstantException: k * mu >= 1 or k < 0.

    Returns:
        float: gamma_k.
    """
    if k < 0:
        raise RoundoffConstantException(f"k must be non-negative, got {k}")
    km = k * mu
    if km >= 1.0:
        raise RoundoffConstantException(f"k * mu = {km} >= 1")
    return km / (1.0 - km)

####################
#
# Perturbation scheme
#
####################

class BasePointRule(str, _enum.Enum):
    LOWER_BOUNDS = "LowerBounds"

class DeltaRule(str, _enum.Enum):
    FULL_RANGE = "FullRange"
    HALF_RANGE = "HalfRange"

@_dataclass(frozen=True)
class PerturbationScheme:
    """Base point and step for the forward differences.

    The default, lower-bound corner perturbed by the full range, is the
    convention under which (x1 - x2)**2 on [-1, 1] gives tau = 8.
    """
    base_point_rule: BasePointRule = BasePointRule.LOWER_BOUNDS
    delta_rule: DeltaRule = DeltaRule.FULL_RANGE

    def __post_init__(self):
        object.__setattr__(self, "base_point_rule", BasePointRule(self.base_point_rule))
        object.__setattr__(self, "delta_rule", DeltaRule(self.delta_rule))

    def base_point(self, instance: ProblemInstance) -> _np.ndarray:
        return instance.lower

    def delta(self, instance: ProblemInstance) -> _np.ndarray:
        full = instance.upper - instance.lower
        return full if self.delta_rule is DeltaRule.FULL_RANGE else full / 2.0

    def to_dict(self) -> dict:
        return {"base_point_rule": self.base_point_rule.value, "delta_rule": self.delta_rule.value}

    @classmethod
    def from_dict(cls, data: dict | None) -> "PerturbationScheme":
        data = data or {}
        return cls(base_point_rule=data.get("base_point_rule", BasePointRule.LOWER_BOUNDS),
                   delta_rule=data.get("delta_rule", DeltaRule.FULL_RANGE))

DEFAULT_SCHEME = PerturbationScheme()

####################
#
# Pair quantities
#
####################

@_dataclass(frozen=True)
class PairQuantities:
    tau: float
    delta1: float
    delta2: float
    e_inf: float
    e_sup: float
    d: float

@_dataclass
class EvaluationCache:
    """Base-point value and single-coordinate perturbation values, shared by all pairs."""
    base_point: _np.ndarray
    delta: _np.ndarray
    f_base: float
    f_single: _np.ndarray

    @classmethod
    def warm(cls, instance: ProblemInstance, scheme: PerturbationScheme = DEFAULT_SCHEME) -> "EvaluationCache":
        """Evaluate the base point and the n single perturbations (1 + n evaluations)."""
        base = scheme.base_point(instance)
        delta = scheme.delta(instance)
        f_base = evaluate(instance, base)
        f_single = _np.empty(instance.n)
        for i in range(instance.n):
            f_single[i] = evaluate(instance, perturb(base, delta, i))
        return cls(base_point=base, delta=delta, f_base=f_base, f_single=f_single)

def perturb(base: _np.ndarray, delta: _np.ndarray, *indices: int) -> _np.ndarray:
    x = base.copy()
    for i in indices:
        x[i] = base[i] + delta[i]
    return x

def _check_pair(n: int, p: int, q: int) -> None:
    if not (0 <= p < n and 0 <= q < n):
        raise InvalidPairException(f"pair ({p}, {q}) out of range for n={n}")
    if p == q:
        raise InvalidPairException(f"pair indices must differ, got ({p}, {q})")

def quantities_from_values(f1: float, f2: float, f3: float, f4: float, gamma2: float, gamma_sqrt_n: float) -> PairQuantities:
    """Pair quantities from the four function values.

    f1 is the base point, f2 has x_p perturbed, f3 has x_q perturbed and f4 both.
    e_sup is raised to e_inf whenever the printed bound falls below it.
    """
    delta1 = f2 - f1
    delta2 = f4 - f3
    tau = abs(delta1 - delta2)
    e_inf = gamma2 * max(abs(f1 + f4), abs(f2 + f3))
    e_sup = max(gamma_sqrt_n * max(f1, f2, f3, f4), e_inf)
    return PairQuantities(tau=tau, delta1=delta1, delta2=delta2, e_inf=e_inf, e_sup=e_sup,
                          d=max(abs(delta1), abs(delta2)))

def pair_quantities(instance: ProblemInstance, p: int, q: int,
                    scheme: PerturbationScheme = DEFAULT_SCHEME,
                    cache: EvaluationCache | None = None) -> PairQuantities:
    """Interaction quantities for the pair (p, q), 0-based.

    With a warm cache exactly one fresh evaluation (both coordinates
    perturbed) is consumed; without one the cache is built first.

    Args:
        instance (ProblemInstance): problem.
        p (int): first variable.
        q (int): second variable.
        scheme (PerturbationScheme, optional): perturbation convention.
        cache (EvaluationCache | None, optional): shared base evaluations.

    Raises:
        InvalidPairException: index out of range or p == q.

    Returns:
        PairQuantities: tau, delta1, delta2, e_inf, e_sup, d.
    """
    _check_pair(instance.n, p, q)
    if cache is None:
        cache = EvaluationCache.warm(instance, scheme)
    f4 = evaluate(instance, perturb(cache.base_point, cache.delta, p, q))
    return quantities_from_values(cache.f_base, float(cache.f_single[p]), float(cache.f_single[q]), f4,
                                  gamma_constant(2.0), gamma_constant(_math.sqrt(instance.n)))

####################
#
# Interaction structure
#
####################

@_dataclass(frozen=True)
class InteractionData:
    """Symmetric n x n matrices of tau (gamma), e_inf, e_sup and max |delta| (d).

    Diagonal entries are zero and carry no meaning.
    """
    n: int
    gamma: _np.ndarray
    e_inf: _np.ndarray
    e_sup: _np.ndarray
    d: _np.ndarray
    fe_used: int

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    def upper(self, matrix: _np.ndarray) -> _np.ndarray:
        """Upper-triangle entries in row-major pair order."""
        return matrix[_np.triu_indices(self.n, 1)]

    def pair(self, p: int, q: int) -> tuple[float, float, float, float]:
        _check_pair(self.n, p, q)
        return (float(self.gamma[p, q]), float(self.e_inf[p, q]), float(self.e_sup[p, q]), float(self.d[p, q]))

    def scaled(self, factor: float) -> "InteractionData":
        """Copy with every matrix multiplied by ``factor``; fe_used is kept."""
        return InteractionData(self.n, _frozen(self.gamma * factor), _frozen(self.e_inf * factor),
                               _frozen(self.e_sup * factor), _frozen(self.d * factor), self.fe_used)

def expected_fe(n: int) -> int:
    """Evaluations of one full build: base point, n singles, one per pair."""
    return 1 + n + n * (n - 1) // 2

def _frozen(matrix: _np.ndarray) -> _np.ndarray:
    matrix.setflags(write=False)
    return matrix

def build_interaction_data(instance: ProblemInstance,
                           scheme: PerturbationScheme = DEFAULT_SCHEME,
                           workers: int = 1) -> InteractionData:
    """Build the full interaction structure of ``instance``.

    Each pair is computed once for p < q and mirrored, so every matrix
    equals its transpose exactly.

    Args:
        instance (ProblemInstance): problem, n >= 2.
        scheme (PerturbationScheme, optional): perturbation convention.
        workers (int, optional): threads used for the pair evaluations. Defaults to 1.

    Raises:
        RuntimeError: the instance counter moved by other than 1 + n + n(n-1)/2.

    Returns:
        InteractionData: immutable matrices plus the evaluations used.
    """
    n = instance.n
    start = instance.fe_count
    logger.info("building interaction structure: n=%d, %d pairs", n, n * (n - 1) // 2)
    cache = EvaluationCache.warm(instance, scheme)
    gamma2 = gamma_constant(2.0)
    gamma_sqrt_n = gamma_constant(_math.sqrt(n))
    rows, cols = _np.triu_indices(n, 1)

    def f4(pair):
        p, q = pair
        return evaluate(instance, perturb(cache.base_point, cache.delta, p, q))

    pairs = list(zip(rows.tolist(), cols.tolist()))
    if workers > 1:
        with _ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(f4, pairs))
    else:
        values = [f4(pair) for pair in pairs]

    gamma, e_inf, e_sup, d = (_np.zeros((n, n)) for _ in range(4))
    for (p, q), value in zip(pairs, values):
        pq = quantities_from_values(cache.f_base, cache.f_single[p], cache.f_single[q], value, gamma2, gamma_sqrt_n)
        gamma[p, q] = gamma[q, p] = pq.tau
        e_inf[p, q] = e_inf[q, p] = pq.e_inf
        e_sup[p, q] = e_sup[q, p] = pq.e_sup
        d[p, q] = d[q, p] = pq.d

    fe_used = instance.fe_count - start
    if fe_used != expected_fe(n):
        raise RuntimeError(f"evaluation accounting mismatch: used {fe_used}, expected {expected_fe(n)}")
    logger.info("interaction structure complete: fe_used=%d", fe_used)
    return InteractionData(n=n, gamma=_frozen(gamma), e_inf=_frozen(e_inf), e_sup=_frozen(e_sup),
                           d=_frozen(d), fe_used=fe_used)

####################
#
# Diagnostics export
#
####################

def pair_table(data: InteractionData) -> list[tuple[int, int, float, float, float, float]]:
    """One row per pair: 1-based p, q, then tau, e_inf, e_sup, d."""
    rows, cols = _np.triu_indices(data.n, 1)
    return [(int(p) + 1, int(q) + 1, float(data.gamma[p, q]), float(data.e_inf[p, q]),
             float(data.e_sup[p, q]), float(data.d[p, q])) for p, q in zip(rows, cols)]

def write_interaction_csv(data: InteractionData, path: str | _pathlib.Path) -> _pathlib.Path:
    rows = ((p, q, *(format_float(v) for v in values)) for p, q, *values in pair_table(data))
    return write_csv(path, PAIR_CSV_HEADER, rows)
