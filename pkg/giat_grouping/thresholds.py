##########################################################
# giat_grouping.thresholds
#
#   Threshold strategies for interaction detection:
#     FT   - fixed threshold
#     FST  - function-space based threshold
#     CRET - per-pair roundoff error based threshold
#     GIAT - global-information adaptive threshold on the
#            interaction indicator zeta
#
#   Released under the MIT License.
#
##########################################################

import enum as _enum
import logging as _logging
import math as _math
import pathlib as _pathlib
from dataclasses import dataclass as _dataclass

import numpy as _np

from .bench_suite import ProblemInstance, evaluate
from .interaction import InteractionData
from .utilities import format_float, write_csv

logger = _logging.getLogger(__name__)

DEFAULT_FT_EPS = 1e-3
DEFAULT_FST_ALPHA = 1e-10
DEFAULT_FST_K = 10

_FST_STREAM = 7

class InvalidThresholdException(ValueError):
    "Raised when a threshold parameter is out of range."
    pass

class Strategy(str, _enum.Enum):
    FT = "FT"
    FST = "FST"
    CRET = "CRET"
    GIAT = "GIAT"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        try:
            return cls(str(value).upper()) if not isinstance(value, cls) else value
        except ValueError:
            raise InvalidThresholdException(f"unknown strategy {value!r}; expected one of {[s.value for s in cls]}") from None

class Basis(str, _enum.Enum):
    RAW_TAU = "RawTau"
    INDICATOR = "Indicator"

class Verdict(str, _enum.Enum):
    PARTIAL = "Partial"
    FULLY_SEPARABLE = "FullySeparable"
    FULLY_NONSEPARABLE = "FullyNonseparable"

@_dataclass(frozen=True, eq=False)
class ThresholdDecision:
    """Output of a threshold strategy.

    Exactly one of ``scalar_eps`` (FT, FST, GIAT) and ``pair_eps`` (CRET) is set.
    GIAT decisions apply to the indicator matrix, the others to raw tau.
    """
    strategy: Strategy
    basis: Basis
    scalar_eps: float | None = None
    pair_eps: _np.ndarray | None = None
    verdict: Verdict = Verdict.PARTIAL

    def __post_init__(self):
        if (self.scalar_eps is None) == (self.pair_eps is None):
            raise InvalidThresholdException("exactly one of scalar_eps and pair_eps must be set")
        if (self.pair_eps is not None) != (self.strategy is Strategy.CRET):
            raise InvalidThresholdException(f"{self.strategy.value} does not match the threshold form")
        expected = Basis.INDICATOR if self.strategy is Strategy.GIAT else Basis.RAW_TAU
        if self.basis is not expected:
            raise InvalidThresholdException(f"{self.strategy.value} requires basis {expected.value}")

    def eps_record(self) -> float | str | dict:
        """JSON-friendly threshold: the scalar ('inf' for +infinity) or a per-pair summary."""
        if self.pair_eps is not None:
            upper = self.pair_eps[_np.triu_indices(self.pair_eps.shape[0], 1)]
            if upper.size == 0:
                return {"per_pair": {"min": 0.0, "max": 0.0}}
            return {"per_pair": {"min": float(upper.min()), "max": float(upper.max())}}
        if _math.isinf(self.scalar_eps):
            return "inf"
        return float(self.scalar_eps)

    def __repr__(self):
        eps = self.eps_record()
        return f"ThresholdDecision(strategy={self.strategy.value}, basis={self.basis.value}, eps={eps}, verdict={self.verdict.value})"

@_dataclass(frozen=True)
class ZetaMatrix:
    n: int
    values: _np.ndarray

####################
#
# FT, FST and CRET
#
####################

def ft_threshold(eps: float = DEFAULT_FT_EPS) -> ThresholdDecision:
    """Fixed threshold, usually 1e-1 or 1e-3.

    Raises:
        InvalidThresholdException: eps <= 0.
    """
    if not eps > 0:
        raise InvalidThresholdException(f"FT threshold must be positive, got {eps}")
    return ThresholdDecision(Strategy.FT, Basis.RAW_TAU, scalar_eps=float(eps))

def fst_threshold(instance: ProblemInstance, k: int = DEFAULT_FST_K, alpha: float = DEFAULT_FST_ALPHA,
                  seed: int = 0) -> ThresholdDecision:
    """Function-space threshold: alpha * min |f| over k uniform samples in the box.

    Consumes exactly ``k`` evaluations of ``instance``.

    Args:
        instance (ProblemInstance): problem to sample.
        k (int, optional): number of samples. Defaults to 10.
        alpha (float, optional): control parameter. Defaults to 1e-10.
        seed (int, optional): sampling seed. Defaults to 0.

    Raises:
        InvalidThresholdException: k < 1 or alpha <= 0.

    Returns:
        ThresholdDecision: scalar threshold on raw tau.
    """
    if k < 1:
        raise InvalidThresholdException(f"FST sample count must be >= 1, got {k}")
    if not alpha > 0:
        raise InvalidThresholdException(f"FST alpha must be positive, got {alpha}")
    rng = _np.random.default_rng([seed, _FST_STREAM])
    lower, upper = instance.lower, instance.upper
    samples = lower + rng.random((k, instance.n)) * (upper - lower)
    values = [evaluate(instance, x) for x in samples]
    return ThresholdDecision(Strategy.FST, Basis.RAW_TAU, scalar_eps=fst_from_values(values, alpha))

def fst_from_values(values, alpha: float = DEFAULT_FST_ALPHA) -> float:
    """alpha * min |f| over sampled function values."""
    return alpha * min(abs(v) for v in values)

def cret_thresholds(data: InteractionData) -> ThresholdDecision:
    """Per-pair thresholds from the roundoff bounds.

    Decisive pairs (tau < e_inf or tau > e_sup) get the bound they fall
    outside of. Pairs in between get w * e_sup + (1 - w) * e_inf with
    w = eta0 / (eta0 + eta1), the share of decisively separable pairs
    (1/2 when no pair is decisive).
    """
    tau, e_inf, e_sup = data.gamma, data.e_inf, data.e_sup
    below = tau < e_inf
    above = tau > e_sup
    eta0 = int(data.upper(below).sum())
    eta1 = int(data.upper(above).sum())
    w = eta0 / (eta0 + eta1) if eta0 + eta1 else 0.5
    blend = w * e_sup + (1.0 - w) * e_inf
    pair_eps = _np.where(below, e_inf, _np.where(above, e_sup, blend))
    _np.fill_diagonal(pair_eps, 0.0)
    pair_eps.setflags(write=False)
    logger.debug("CRET: eta0=%d eta1=%d w=%.6g", eta0, eta1, w)
    return ThresholdDecision(Strategy.CRET, Basis.RAW_TAU, pair_eps=pair_eps)

####################
#
# GIAT
#
####################

def compute_zeta(data: InteractionData) -> ZetaMatrix:
    """Interaction indicator zeta = (tau - e_inf)^+ / max(|delta1|, |delta2|).

    zeta is 0 whenever tau <= e_inf or the denominator is 0.
    """
    excess = data.gamma - data.e_inf
    active = (excess > 0) & (data.d > 0)
    values = _np.zeros((data.n, data.n))
    values[active] = excess[active] / data.d[active]
    _np.fill_diagonal(values, 0.0)
    values.setflags(write=False)
    return ZetaMatrix(n=data.n, values=values)

zeta = compute_zeta

def quotient_differences(z: _np.ndarray) -> _np.ndarray:
    """V[k] = z[k+1] / z[k], or 0 where z[k] == 0.

    V[k] corresponds to position k + 2 of the 1-based sorted array.
    """
    z = _np.asarray(z, dtype=float)
    v = _np.zeros(max(z.size - 1, 0))
    previous, following = z[:-1], z[1:]
    nonzero = previous != 0
    v[nonzero] = following[nonzero] / previous[nonzero]
    return v

def select_gap_threshold(z: _np.ndarray, v: _np.ndarray) -> float:
    """Smaller indicator of the adjacent pair with the largest quotient.

    Ties go to the smallest index. An empty V gives 0.
    """
    if v.size == 0:
        return 0.0
    return float(z[int(_np.argmax(v))])

def giat_threshold(data: InteractionData) -> tuple[ThresholdDecision, ZetaMatrix, _np.ndarray, _np.ndarray]:
    """Global-information adaptive threshold.

    Fully separable (every tau < e_inf) gives eps = inf, fully nonseparable
    (every tau > e_sup) gives eps = 0. Otherwise the sorted indicator array
    Z and its quotient differences V are built; eps is 0 when no pair lies
    strictly between its bounds, else the lower side of the largest gap.

    Args:
        data (InteractionData): complete interaction structure, n >= 2.

    Returns:
        tuple[ThresholdDecision, ZetaMatrix, ndarray, ndarray]: decision, zeta,
        sorted Z (empty for the fully separable/nonseparable verdicts) and V.
    """
    tau, e_inf, e_sup = data.upper(data.gamma), data.upper(data.e_inf), data.upper(data.e_sup)
    indicators = compute_zeta(data)
    empty = _np.zeros(0)

    if _np.all(tau < e_inf):
        logger.info("GIAT: fully separable, eps = inf")
        decision = ThresholdDecision(Strategy.GIAT, Basis.INDICATOR, scalar_eps=_math.inf,
                                     verdict=Verdict.FULLY_SEPARABLE)
        return decision, indicators, empty, empty
    if _np.all(tau > e_sup):
        logger.info("GIAT: fully nonseparable, eps = 0")
        decision = ThresholdDecision(Strategy.GIAT, Basis.INDICATOR, scalar_eps=0.0,
                                     verdict=Verdict.FULLY_NONSEPARABLE)
        return decision, indicators, empty, empty

    z = _np.sort(_np.maximum(data.upper(indicators.values), 0.0))
    v = quotient_differences(z)
    if not _np.any((e_inf < tau) & (tau < e_sup)):
        eps = 0.0
    else:
        eps = select_gap_threshold(z, v)
    logger.info("GIAT: partially separable, eps = %s", format_float(eps))
    decision = ThresholdDecision(Strategy.GIAT, Basis.INDICATOR, scalar_eps=eps, verdict=Verdict.PARTIAL)
    return decision, indicators, z, v

giat = giat_threshold

def write_indicator_arrays(z: _np.ndarray, v: _np.ndarray, directory: str | _pathlib.Path,
                           stem: str = "indicators") -> tuple[_pathlib.Path, _pathlib.Path]:
    """Write Z and V as two-column (index, value) CSVs.

    Z is indexed 1..len(Z); V entries carry the index of the larger element, 2..len(Z).
    """
    directory = _pathlib.Path(directory)
    z_path = write_csv(directory / f"{stem}_Z.csv", ("index", "value"),
                       ((i + 1, format_float(x)) for i, x in enumerate(z)))
    v_path = write_csv(directory / f"{stem}_V.csv", ("index", "value"),
                       ((i + 2, format_float(x)) for i, x in enumerate(v)))
    return z_path, v_path
