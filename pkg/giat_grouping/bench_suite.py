##########################################################
# giat_grouping.bench_suite
#
#   Scalable partially separable test problems with a known
#   grouping, built from shifted, optionally rotated base functions.
#
#   Released under the MIT License.
#
##########################################################

import enum as _enum
import json as _json
import logging as _logging
import math as _math
import pathlib as _pathlib
import threading as _threading
from dataclasses import dataclass as _dataclass, field as _field
from typing import Any as _Any, Sequence as _Sequence

import numpy as _np

logger = _logging.getLogger(__name__)

DEFAULT_BOUNDS = (-100.0, 100.0)
EXAMPLE1_BOUNDS = (-1.0, 1.0)
DEFAULT_SIGMA = 3.0
ELLIPTIC_CONDITION = 1.0e6
ORTHOGONALITY_TOLERANCE = 1e-10

# RNG streams, combined with the instance seed
_SHIFT_STREAM = 0
_WEIGHT_STREAM = 1
_ROTATION_STREAM = 2
_PERMUTATION_STREAM = 3

class InvalidProblemSpecException(ValueError):
    "Raised when a problem specification violates one of its invariants."
    pass

class DimensionMismatchException(ValueError):
    "Raised when a point or result does not match the problem dimension."
    pass

####################
#
# Base functions
#
####################

class BaseFunctionKind(str, _enum.Enum):
    SPHERE = "Sphere"
    ELLIPTIC = "Elliptic"
    RASTRIGIN = "Rastrigin"
    ACKLEY = "Ackley"
    SCHWEFEL12 = "Schwefel12"
    ROSENBROCK = "Rosenbrock"

    @property
    def separable(self) -> bool:
        return self not in (BaseFunctionKind.SCHWEFEL12, BaseFunctionKind.ROSENBROCK)

    @property
    def additive(self) -> bool:
        # Ackley is separable in the optimisation sense but not a sum of per-coordinate terms;
        # a separable Ackley block is evaluated as a sum of 1-d Ackley terms instead
        return self.separable and self is not BaseFunctionKind.ACKLEY

    @property
    def min_dim(self) -> int:
        return 1 if self.separable else 2

    @classmethod
    def parse(cls, value: "str | BaseFunctionKind") -> "BaseFunctionKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).lower():
                return kind
        raise InvalidProblemSpecException(f"unknown base function {value!r}")

def sphere_terms(z: _np.ndarray) -> _np.ndarray:
    return z * z

def elliptic_terms(z: _np.ndarray) -> _np.ndarray:
    d = z.size
    if d == 1:
        return z * z
    coefficients = ELLIPTIC_CONDITION ** (_np.arange(d) / (d - 1))
    return coefficients * (z * z)

def rastrigin_terms(z: _np.ndarray) -> _np.ndarray:
    return z * z - 10.0 * _np.cos(2.0 * _np.pi * z) + 10.0

def ackley_terms(z: _np.ndarray) -> _np.ndarray:
    d = z.size
    mean_square = _math.fsum(z * z) / d
    mean_cos = _math.fsum(_np.cos(2.0 * _np.pi * z)) / d
    value = -20.0 * _math.exp(-0.2 * _math.sqrt(mean_square)) - _math.exp(mean_cos) + 20.0 + _math.e
    return _np.array([value])

def schwefel12_terms(z: _np.ndarray) -> _np.ndarray:
    partial = _np.cumsum(z)
    return partial * partial

def rosenbrock_terms(z: _np.ndarray) -> _np.ndarray:
    head, tail = z[:-1], z[1:]
    return 100.0 * (head * head - tail) ** 2 + (head - 1.0) ** 2

BASE_TERMS = {
    BaseFunctionKind.SPHERE: sphere_terms,
    BaseFunctionKind.ELLIPTIC: elliptic_terms,
    BaseFunctionKind.RASTRIGIN: rastrigin_terms,
    BaseFunctionKind.ACKLEY: ackley_terms,
    BaseFunctionKind.SCHWEFEL12: schwefel12_terms,
    BaseFunctionKind.ROSENBROCK: rosenbrock_terms,
}

def base_value(kind: BaseFunctionKind, z: _Sequence[float]) -> float:
    """Value of a base function at an already transformed point.

    Args:
        kind (BaseFunctionKind): base function.
        z (Sequence[float]): transformed coordinates.

    Returns:
        float: correctly rounded sum of the function's terms.
    """
    z = _np.asarray(z, dtype=float)
    if z.size < kind.min_dim:
        raise DimensionMismatchException(f"{kind.value} requires dimension >= {kind.min_dim}, got {z.size}")
    return _math.fsum(BASE_TERMS[kind](z))

####################
#
# Problem specification
#
####################

@_dataclass(frozen=True)
class WeightMode:
    """Balanced (weights as given) or Imbalanced (weights scaled by 10**(sigma * N(0, 1)))."""
    kind: str = "Balanced"
    sigma: float = DEFAULT_SIGMA

    @property
    def imbalanced(self) -> bool:
        return self.kind == "Imbalanced"

    def to_json(self) -> _Any:
        return {"Imbalanced": {"sigma": self.sigma}} if self.imbalanced else "Balanced"

    @classmethod
    def from_json(cls, value: _Any) -> "WeightMode":
        match value:
            case None | "Balanced":
                return cls()
            case "Imbalanced":
                return cls("Imbalanced", DEFAULT_SIGMA)
            case {"Imbalanced": {"sigma": sigma}}:
                return cls("Imbalanced", float(sigma))
            case {"Imbalanced": sigma} if isinstance(sigma, (int, float)):
                return cls("Imbalanced", float(sigma))
            case _:
                raise InvalidProblemSpecException(f"unknown weight_mode {value!r}")

BALANCED = WeightMode()

def imbalanced(sigma: float = DEFAULT_SIGMA) -> WeightMode:
    return WeightMode("Imbalanced", float(sigma))

@_dataclass(frozen=True)
class SubcomponentSpec:
    size: int
    base: BaseFunctionKind = BaseFunctionKind.ELLIPTIC
    rotated: bool = False
    weight: float = 1.0
    # base applied to successive differences of the block, e.g. (x1 - x2)**2
    coupled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base", BaseFunctionKind.parse(self.base))

    @property
    def effective_dim(self) -> int:
        return self.size - 1 if self.coupled else self.size

    @property
    def nonseparable(self) -> bool:
        return self.rotated or self.coupled or not self.base.additive

    def to_dict(self) -> dict:
        return {"size": self.size, "base": self.base.value, "rotated": self.rotated,
                "weight": self.weight, "coupled": self.coupled}

    @classmethod
    def from_dict(cls, data: dict) -> "SubcomponentSpec":
        try:
            return cls(size=int(data["size"]), base=data["base"], rotated=bool(data.get("rotated", False)),
                       weight=float(data.get("weight", 1.0)), coupled=bool(data.get("coupled", False)))
        except KeyError as exc:
            raise InvalidProblemSpecException(f"subcomponent missing field {exc.args[0]!r}") from None

@_dataclass(frozen=True)
class ProblemSpec:
    """Declarative description of a partially separable problem.

    Variables are laid out subcomponent by subcomponent, followed by the
    separable block, unless ``permuted`` scatters them.
    """
    separable_dims: int = 0
    separable_base: BaseFunctionKind = BaseFunctionKind.SPHERE
    subcomponents: tuple[SubcomponentSpec, ...] = ()
    lower_bound: float = DEFAULT_BOUNDS[0]
    upper_bound: float = DEFAULT_BOUNDS[1]
    weight_mode: WeightMode = BALANCED
    shifted: bool = True
    permuted: bool = False
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "separable_base", BaseFunctionKind.parse(self.separable_base))
        object.__setattr__(self, "subcomponents", tuple(self.subcomponents))

    @property
    def n(self) -> int:
        return self.separable_dims + sum(s.size for s in self.subcomponents)

    def to_dict(self) -> dict:
        return {
            "separable_dims": self.separable_dims,
            "separable_base": self.separable_base.value,
            "subcomponents": [s.to_dict() for s in self.subcomponents],
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "weight_mode": self.weight_mode.to_json(),
            "shifted": self.shifted,
            "permuted": self.permuted,
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        known = {"separable_dims", "separable_base", "subcomponents", "lower_bound", "upper_bound",
                 "weight_mode", "shifted", "permuted", "scale"}
        unknown = set(data) - known
        if unknown:
            raise InvalidProblemSpecException(f"unknown ProblemSpec fields: {sorted(unknown)}")
        return cls(
            separable_dims=int(data.get("separable_dims", 0)),
            separable_base=data.get("separable_base", BaseFunctionKind.SPHERE),
            subcomponents=tuple(SubcomponentSpec.from_dict(s) for s in data.get("subcomponents", [])),
            lower_bound=float(data.get("lower_bound", DEFAULT_BOUNDS[0])),
            upper_bound=float(data.get("upper_bound", DEFAULT_BOUNDS[1])),
            weight_mode=WeightMode.from_json(data.get("weight_mode")),
            shifted=bool(data.get("shifted", True)),
            permuted=bool(data.get("permuted", False)),
            scale=float(data.get("scale", 1.0)),
        )

    def to_json(self, indent: int | None = 2) -> str:
        return _json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_dict(_json.loads(text))

def load_problem_spec(path: str | _pathlib.Path) -> ProblemSpec:
    return ProblemSpec.from_json(_pathlib.Path(path).read_text(encoding="utf-8"))

def save_problem_spec(spec: ProblemSpec, path: str | _pathlib.Path) -> _pathlib.Path:
    p = _pathlib.Path(path)
    p.write_text(spec.to_json() + "\n", encoding="utf-8")
    return p

def validate_spec(spec: ProblemSpec) -> None:
    """Check ProblemSpec and SubcomponentSpec invariants.

    Raises:
        InvalidProblemSpecException: names the first violated invariant.
    """
    def fail(message):
        raise InvalidProblemSpecException(message)

    if spec.separable_dims < 0:
        fail(f"separable_dims must be >= 0, got {spec.separable_dims}")
    if spec.separable_dims > 0 and not spec.separable_base.separable:
        fail(f"separable_base {spec.separable_base.value} is intrinsically nonseparable")
    if spec.n < 2:
        fail(f"total dimension n must be >= 2, got {spec.n}")
    if not (_math.isfinite(spec.lower_bound) and _math.isfinite(spec.upper_bound)):
        fail("bounds must be finite")
    if not spec.lower_bound < spec.upper_bound:
        fail(f"lower_bound < upper_bound violated: {spec.lower_bound} >= {spec.upper_bound}")
    if not spec.shifted and not spec.lower_bound < 0.0 < spec.upper_bound:
        fail("unshifted problems need 0 strictly inside the bounds")
    if not (spec.scale > 0 and _math.isfinite(spec.scale)):
        fail(f"scale must be a positive finite number, got {spec.scale}")
    if spec.weight_mode.imbalanced and not spec.weight_mode.sigma >= 0:
        fail(f"weight_mode sigma must be >= 0, got {spec.weight_mode.sigma}")
    for i, sub in enumerate(spec.subcomponents):
        if sub.size < 1:
            fail(f"subcomponent {i}: size must be positive, got {sub.size}")
        if sub.nonseparable and sub.size < 2:
            fail(f"subcomponent {i}: size >= 2 required for a nonseparable subcomponent")
        if sub.effective_dim < sub.base.min_dim:
            fail(f"subcomponent {i}: {sub.base.value} requires dimension >= {sub.base.min_dim}")
        if not (sub.weight > 0 and _math.isfinite(sub.weight)):
            fail(f"subcomponent {i}: weight must be > 0, got {sub.weight}")
        if sub.rotated and not sub.coupled and sub.base is BaseFunctionKind.SPHERE:
            fail(f"subcomponent {i}: a rotated Sphere stays additively separable (rotation preserves the norm)")

####################
#
# Problem instances
#
####################

@_dataclass(frozen=True)
class GroupingTruth:
    """Known partition: nonseparable groups and separable variables (0-based indices)."""
    nonsep_groups: tuple[tuple[int, ...], ...]
    sep_vars: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.sep_vars) + sum(len(g) for g in self.nonsep_groups)

    def to_dict(self) -> dict:
        return {"groups": [[i + 1 for i in g] for g in self.nonsep_groups],
                "separable": [i + 1 for i in self.sep_vars]}

def random_rotation(dim: int, rng: _np.random.Generator) -> _np.ndarray:
    """Orthogonal matrix from the QR factorisation of a Gaussian matrix.

    Column signs follow the diagonal of R so the result is unique for a given draw.
    """
    q, r = _np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * _np.where(_np.diag(r) < 0, -1.0, 1.0)
    deviation = _np.max(_np.abs(q.T @ q - _np.eye(dim)))
    if not deviation < ORTHOGONALITY_TOLERANCE:
        raise ArithmeticError(f"rotation orthogonality deviation {deviation:.3e}")
    return q

@_dataclass(eq=False)
class ProblemInstance:
    spec: ProblemSpec
    n: int
    shift: _np.ndarray
    rotations: dict[int, _np.ndarray]
    weights: _np.ndarray
    seed: int
    blocks: tuple[_np.ndarray, ...]
    separable_indices: _np.ndarray
    _fe_count: int = _field(default=0, repr=False)
    _lock: _threading.Lock = _field(default_factory=_threading.Lock, repr=False)

    @property
    def fe_count(self) -> int:
        return self._fe_count

    @property
    def lower(self) -> _np.ndarray:
        return _np.full(self.n, self.spec.lower_bound)

    @property
    def upper(self) -> _np.ndarray:
        return _np.full(self.n, self.spec.upper_bound)

    def __call__(self, point) -> float:
        return evaluate(self, point)

    def __repr__(self):
        class_name = type(self).__name__
        return f"{class_name}(n={self.n}, groups={len(self.blocks)}, seed={self.seed}, fe_count={self._fe_count})"

def build_problem(spec: ProblemSpec, seed: int) -> ProblemInstance:
    """Realise a ProblemSpec into an evaluatable instance.

    Deterministic for a fixed ``(spec, seed)``: shift, weights, rotations and
    permutation each come from their own seeded stream.

    Args:
        spec (ProblemSpec): problem description.
        seed (int): non-negative seed.

    Raises:
        InvalidProblemSpecException: spec invariants violated or negative seed.

    Returns:
        ProblemInstance: fresh instance with fe_count = 0.
    """
    validate_spec(spec)
    if seed < 0:
        raise InvalidProblemSpecException(f"seed must be non-negative, got {seed}")
    n, lb, ub = spec.n, spec.lower_bound, spec.upper_bound

    if spec.shifted:
        u = _np.random.default_rng([seed, _SHIFT_STREAM]).random(n)
        shift = lb + (0.1 + 0.8 * u) * (ub - lb)
    else:
        shift = _np.zeros(n)

    weights = _np.array([s.weight for s in spec.subcomponents], dtype=float)
    if spec.weight_mode.imbalanced and weights.size:
        draws = _np.random.default_rng([seed, _WEIGHT_STREAM]).standard_normal(weights.size)
        weights = weights * 10.0 ** (spec.weight_mode.sigma * draws)

    rotations = {
        i: random_rotation(s.effective_dim, _np.random.default_rng([seed, _ROTATION_STREAM, i]))
        for i, s in enumerate(spec.subcomponents) if s.rotated
    }

    if spec.permuted:
        order = _np.random.default_rng([seed, _PERMUTATION_STREAM]).permutation(n)
    else:
        order = _np.arange(n)
    blocks, offset = [], 0
    for s in spec.subcomponents:
        blocks.append(order[offset:offset + s.size].copy())
        offset += s.size
    separable_indices = order[offset:].copy()

    instance = ProblemInstance(spec=spec, n=n, shift=shift, rotations=rotations, weights=weights,
                               seed=seed, blocks=tuple(blocks), separable_indices=separable_indices)
    logger.debug("built problem n=%d subcomponents=%d separable=%d seed=%d",
                 n, len(blocks), separable_indices.size, seed)
    return instance

def _block_contribution(kind: BaseFunctionKind, z: _np.ndarray, factor: float, additive: bool) -> _np.ndarray:
    terms = BASE_TERMS[kind](z)
    if additive:
        return factor * terms
    return _np.array([factor * _math.fsum(terms)])

def _coordinatewise_terms(kind: BaseFunctionKind, z: _np.ndarray) -> _np.ndarray:
    if kind.additive:
        return BASE_TERMS[kind](z)
    return _np.concatenate([BASE_TERMS[kind](z[i:i + 1]) for i in range(z.size)])

def _contributions(instance: ProblemInstance, x: _np.ndarray) -> list[_np.ndarray]:
    spec = instance.spec
    parts = []
    for i, (sub, idx) in enumerate(zip(spec.subcomponents, instance.blocks)):
        z = x[idx] - instance.shift[idx]
        if sub.coupled:
            z = z[:-1] - z[1:]
        if i in instance.rotations:
            z = instance.rotations[i] @ z
        additive = sub.base.additive and not sub.nonseparable
        parts.append(_block_contribution(sub.base, z, spec.scale * instance.weights[i], additive))
    if instance.separable_indices.size:
        idx = instance.separable_indices
        z = x[idx] - instance.shift[idx]
        parts.append(spec.scale * _coordinatewise_terms(spec.separable_base, z))
    return parts

def _as_point(instance: ProblemInstance, point) -> _np.ndarray:
    x = _np.asarray(point, dtype=float)
    if x.ndim != 1 or x.size != instance.n:
        raise DimensionMismatchException(f"point has shape {x.shape}, expected ({instance.n},)")
    return x

def evaluate(instance: ProblemInstance, point: _Sequence[float]) -> float:
    """Objective value at ``point``; counts one fitness evaluation.

    Every term of an additively separable block enters a single correctly
    rounded sum, so unchanged coordinates contribute bit-identical terms.

    Args:
        instance (ProblemInstance): problem.
        point (Sequence[float]): length-n point, may lie outside the bounds.

    Raises:
        DimensionMismatchException: wrong point length.

    Returns:
        float: f(point).
    """
    x = _as_point(instance, point)
    value = _math.fsum(_np.concatenate(_contributions(instance, x)))
    with instance._lock:
        instance._fe_count += 1
    return value

def component_values(instance: ProblemInstance, point: _Sequence[float]) -> list[float]:
    """Per-subcomponent values (then the separable block, if any); not counted as evaluations."""
    x = _as_point(instance, point)
    return [_math.fsum(part) for part in _contributions(instance, x)]

def ground_truth(instance: ProblemInstance) -> GroupingTruth:
    """Known grouping: rotated, coupled or intrinsically nonseparable subcomponents
    form groups; everything else is separable."""
    groups, separable = [], [int(i) for i in instance.separable_indices]
    for sub, idx in zip(instance.spec.subcomponents, instance.blocks):
        if sub.nonseparable:
            groups.append(tuple(sorted(int(i) for i in idx)))
        else:
            separable.extend(int(i) for i in idx)
    groups.sort()
    return GroupingTruth(nonsep_groups=tuple(groups), sep_vars=tuple(sorted(separable)))

truth = ground_truth

####################
#
# Built-in problems
#
####################

def example1_spec(w1: float = 1.0, w2: float = 1.0) -> ProblemSpec:
    return ProblemSpec(
        separable_dims=0,
        subcomponents=(SubcomponentSpec(2, BaseFunctionKind.SPHERE, weight=w1, coupled=True),
                       SubcomponentSpec(2, BaseFunctionKind.SPHERE, weight=w2, coupled=True)),
        lower_bound=EXAMPLE1_BOUNDS[0],
        upper_bound=EXAMPLE1_BOUNDS[1],
        shifted=False,
    )

def example1(w1: float = 1.0, w2: float = 1.0, seed: int = 0) -> ProblemInstance:
    """f(x) = w1 * (x1 - x2)**2 + w2 * (x3 - x4)**2 on [-1, 1]**4."""
    return build_problem(example1_spec(w1, w2), seed)

CATEGORIES = ("fully_separable", "single_group", "multi_group", "all_groups", "fully_nonseparable")

def category_spec(category: str, dim: int = 50, group_size: int = 5, groups: int = 5,
                  base: BaseFunctionKind = BaseFunctionKind.ELLIPTIC,
                  separable_base: BaseFunctionKind | None = None,
                  weight_mode: WeightMode = BALANCED,
                  bounds: tuple[float, float] = DEFAULT_BOUNDS,
                  permuted: bool = True) -> ProblemSpec:
    """Reduced-dimension analogue of a benchmark-suite category.

    Args:
        category (str): one of CATEGORIES.
        dim (int, optional): total dimension. Defaults to 50.
        group_size (int, optional): size of each nonseparable subcomponent. Defaults to 5.
        groups (int, optional): number of subcomponents for "multi_group". Defaults to 5.
        base (BaseFunctionKind, optional): base of the subcomponents. Defaults to Elliptic.
        separable_base (BaseFunctionKind | None, optional): base of the separable block. Defaults to ``base``.
        weight_mode (WeightMode, optional): Balanced or Imbalanced. Defaults to Balanced.
        bounds (tuple[float, float], optional): box. Defaults to (-100, 100).
        permuted (bool, optional): scatter variables. Defaults to True.

    Raises:
        InvalidProblemSpecException: unknown category, oversized groups, or a base
            that cannot form groups (rotated Sphere).

    Returns:
        ProblemSpec: the category's spec.
    """
    base = BaseFunctionKind.parse(base)
    separable_base = BaseFunctionKind.parse(separable_base or (base if base.separable else BaseFunctionKind.SPHERE))
    rotated = base.separable
    match category:
        case "fully_separable":
            count, size = 0, 0
        case "single_group":
            count, size = 1, group_size
        case "multi_group":
            count, size = groups, group_size
        case "all_groups":
            count, size = dim // group_size, group_size
        case "fully_nonseparable":
            count, size = 1, dim
        case _:
            raise InvalidProblemSpecException(f"unknown category {category!r}; expected one of {CATEGORIES}")
    if count * size > dim:
        raise InvalidProblemSpecException(f"{count} subcomponents of size {size} exceed dimension {dim}")
    subs = tuple(SubcomponentSpec(size, base, rotated=rotated) for _ in range(count))
    spec = ProblemSpec(separable_dims=dim - count * size, separable_base=separable_base, subcomponents=subs,
                       lower_bound=bounds[0], upper_bound=bounds[1], weight_mode=weight_mode,
                       permuted=permuted)
    validate_spec(spec)
    return spec
