##########################################################
# giat_grouping.experiment
#
#   Experiment configuration and the build -> threshold ->
#   group -> score pipeline shared by every CLI verb.
#
#   Released under the MIT License.
#
##########################################################

import dataclasses as _dataclasses
import json as _json
import logging as _logging
import pathlib as _pathlib
from concurrent.futures import ThreadPoolExecutor as _ThreadPoolExecutor
from dataclasses import dataclass as _dataclass, field as _field

import numpy as _np

from .bench_suite import (BaseFunctionKind, GroupingTruth, InvalidProblemSpecException, ProblemInstance,
                          ProblemSpec, build_problem, ground_truth)
from .evaluation import (AccuracyReport, ComparisonRow, score, write_comparison_csv, write_summary_csv)
from .grouping import DecompositionResult, decompose, save_result
from .interaction import DEFAULT_SCHEME, InteractionData, PerturbationScheme, build_interaction_data, expected_fe
from .thresholds import (DEFAULT_FST_ALPHA, DEFAULT_FST_K, DEFAULT_FT_EPS, Strategy, ThresholdDecision,
                         Verdict, ZetaMatrix, cret_thresholds, fst_threshold, ft_threshold, giat_threshold)
from .utilities import derive_seed

logger = _logging.getLogger(__name__)

DESK_SUITE_PATH = _pathlib.Path(__file__).parent / "data" / "desk_suite.json"
DEFAULT_OUTPUT_DIR = "results"
ALL_STRATEGIES = (Strategy.FT, Strategy.FST, Strategy.CRET, Strategy.GIAT)

class ConfigException(ValueError):
    "Raised for invalid experiment configurations and unknown problem or strategy names."
    pass

####################
#
# Configuration
#
####################

@_dataclass(frozen=True)
class ProblemEntry:
    name: str
    spec: ProblemSpec
    seed: int | None = None

    def to_dict(self) -> dict:
        data = {"name": self.name, "spec": self.spec.to_dict()}
        if self.seed is not None:
            data["seed"] = self.seed
        return data

@_dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple[ProblemEntry, ...]
    strategies: tuple[Strategy, ...] = ALL_STRATEGIES
    ft_eps: float = DEFAULT_FT_EPS
    fst_alpha: float = DEFAULT_FST_ALPHA
    fst_k: int = DEFAULT_FST_K
    scheme: PerturbationScheme = DEFAULT_SCHEME
    output_dir: str = DEFAULT_OUTPUT_DIR
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.problems:
            raise ConfigException("configuration needs at least one problem")
        if not self.strategies:
            raise ConfigException("configuration needs at least one strategy")
        names = [p.name for p in self.problems]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ConfigException(f"duplicate problem names: {duplicates}")
        repeated = sorted({s.value for s in self.strategies if self.strategies.count(s) > 1})
        if repeated:
            raise ConfigException(f"duplicate strategies: {repeated}")
        if not self.ft_eps > 0 or not self.fst_alpha > 0 or self.fst_k < 1:
            raise ConfigException("ft_eps and fst_alpha must be positive and fst_k >= 1")
        if self.workers < 1:
            raise ConfigException(f"workers must be >= 1, got {self.workers}")

    def problem(self, name: str) -> ProblemEntry:
        for entry in self.problems:
            if entry.name == name:
                return entry
        raise ConfigException(f"unknown problem {name!r}; available: {[p.name for p in self.problems]}")

    def seed_for(self, name: str) -> int:
        """Explicit entry seed, else one derived from master_seed and the entry position."""
        for index, entry in enumerate(self.problems):
            if entry.name == name:
                return entry.seed if entry.seed is not None else derive_seed(self.master_seed, index)
        raise ConfigException(f"unknown problem {name!r}")

    def with_overrides(self, output_dir: str | None = None, master_seed: int | None = None,
                       strategies: list[str] | None = None, problems: list[str] | None = None,
                       workers: int | None = None) -> "ExperimentConfig":
        """Copy with CLI flag values applied. Selected problems keep their derived seeds."""
        changes = {}
        if output_dir is not None:
            changes["output_dir"] = output_dir
        if master_seed is not None:
            changes["master_seed"] = master_seed
        if strategies:
            changes["strategies"] = tuple(_parse_strategy(s) for s in strategies)
        if workers is not None:
            changes["workers"] = workers
        updated = _dataclasses.replace(self, **changes)
        if problems:
            selected = tuple(_dataclasses.replace(updated.problem(name), seed=updated.seed_for(name))
                             for name in problems)
            updated = _dataclasses.replace(updated, problems=selected)
        return updated

    def to_dict(self) -> dict:
        return {
            "problems": [p.to_dict() for p in self.problems],
            "strategies": [s.value for s in self.strategies],
            "ft_eps": self.ft_eps,
            "fst_alpha": self.fst_alpha,
            "fst_k": self.fst_k,
            "scheme": self.scheme.to_dict(),
            "output_dir": self.output_dir,
            "master_seed": self.master_seed,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            problems = tuple(ProblemEntry(name=str(p["name"]), spec=ProblemSpec.from_dict(p["spec"]),
                                          seed=int(p["seed"]) if p.get("seed") is not None else None)
                             for p in data.get("problems", []))
            return cls(
                problems=problems,
                strategies=tuple(_parse_strategy(s) for s in data.get("strategies", [s.value for s in ALL_STRATEGIES])),
                ft_eps=float(data.get("ft_eps", DEFAULT_FT_EPS)),
                fst_alpha=float(data.get("fst_alpha", DEFAULT_FST_ALPHA)),
                fst_k=int(data.get("fst_k", DEFAULT_FST_K)),
                scheme=PerturbationScheme.from_dict(data.get("scheme")),
                output_dir=str(data.get("output_dir", DEFAULT_OUTPUT_DIR)),
                master_seed=int(data.get("master_seed", 0)),
                workers=int(data.get("workers", 1)),
            )
        except KeyError as exc:
            raise ConfigException(f"problem entry missing field {exc.args[0]!r}") from None
        except InvalidProblemSpecException as exc:
            raise ConfigException(f"invalid problem spec: {exc}") from None
        except ValueError as exc:
            if isinstance(exc, ConfigException):
                raise
            raise ConfigException(str(exc)) from None

def _parse_strategy(value: str) -> Strategy:
    try:
        return Strategy.parse(value)
    except ValueError as exc:
        raise ConfigException(str(exc)) from None

def load_config(path: str | _pathlib.Path) -> ExperimentConfig:
    """Read an ExperimentConfig JSON document.

    Raises:
        ConfigException: malformed JSON or invalid content.
    """
    try:
        data = _json.loads(_pathlib.Path(path).read_text(encoding="utf-8"))
    except _json.JSONDecodeError as exc:
        raise ConfigException(f"{path}: {exc}") from None
    return ExperimentConfig.from_dict(data)

def desk_suite_config() -> ExperimentConfig:
    """The bundled reduced-dimension suite."""
    return load_config(DESK_SUITE_PATH)

####################
#
# Pipeline
#
####################

@_dataclass(eq=False)
class StrategyRun:
    problem: str
    decision: ThresholdDecision
    result: DecompositionResult
    report: AccuracyReport
    fe_used: int
    zeta: ZetaMatrix | None = None
    z: _np.ndarray | None = None
    v: _np.ndarray | None = None

    @property
    def strategy(self) -> Strategy:
        return self.decision.strategy

    def comparison_row(self) -> ComparisonRow:
        return ComparisonRow(self.problem, self.strategy.value, self.report, self.fe_used)

    def json_extra(self, seed: int) -> dict:
        return {"problem": self.problem, "seed": seed, "verdict": self.decision.verdict.value,
                "fe_used": self.fe_used, "exact": self.report.exact}

@_dataclass(eq=False)
class ProblemRun:
    name: str
    seed: int
    instance: ProblemInstance
    truth: GroupingTruth
    data: InteractionData
    runs: list[StrategyRun] = _field(default_factory=list)

    @property
    def has_ackley(self) -> bool:
        spec = self.instance.spec
        kinds = {s.base for s in spec.subcomponents}
        if spec.separable_dims:
            kinds.add(spec.separable_base)
        return BaseFunctionKind.ACKLEY in kinds

def run_strategy(name: str, instance: ProblemInstance, data: InteractionData, truth: GroupingTruth,
                 strategy: Strategy, config: ExperimentConfig, seed: int = 0) -> StrategyRun:
    """Threshold, classify, group and score one strategy on a shared interaction structure.

    Raises:
        RuntimeError: the evaluations used differ from 1 + n + n(n-1)/2 (+ fst_k for FST).
    """
    before = instance.fe_count
    zeta = z = v = None
    match strategy:
        case Strategy.FT:
            decision = ft_threshold(config.ft_eps)
        case Strategy.FST:
            decision = fst_threshold(instance, config.fst_k, config.fst_alpha, seed=seed)
        case Strategy.CRET:
            decision = cret_thresholds(data)
        case Strategy.GIAT:
            decision, zeta, z, v = giat_threshold(data)
        case _:
            raise ConfigException(f"unknown strategy {strategy!r}")
    fe_used = data.fe_used + instance.fe_count - before
    expected = expected_fe(data.n) + (config.fst_k if strategy is Strategy.FST else 0)
    if fe_used != expected:
        raise RuntimeError(f"{name}/{strategy.value}: used {fe_used} evaluations, expected {expected}")
    result = decompose(data, decision, zeta)
    report = score(result, truth)
    return StrategyRun(problem=name, decision=decision, result=result, report=report, fe_used=fe_used,
                       zeta=zeta, z=z, v=v)

def run_problem(config: ExperimentConfig, name: str, strategies: tuple[Strategy, ...] | None = None) -> ProblemRun:
    """Build one configured problem, its interaction structure, and run each strategy on it."""
    entry = config.problem(name)
    seed = config.seed_for(name)
    instance = build_problem(entry.spec, seed)
    truth = ground_truth(instance)
    data = build_interaction_data(instance, config.scheme)
    run = ProblemRun(name=name, seed=seed, instance=instance, truth=truth, data=data)
    for strategy in strategies or config.strategies:
        outcome = run_strategy(name, instance, data, truth, strategy, config, seed)
        run.runs.append(outcome)
        if run.has_ackley and not outcome.report.exact:
            logger.warning("%s/%s: inexact on an Ackley-based problem (expected limitation)",
                           name, strategy.value)
    return run

def run_experiment(config: ExperimentConfig) -> list[ProblemRun]:
    """Run every configured problem; results come back in config order."""
    names = [p.name for p in config.problems]
    if config.workers > 1:
        with _ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda name: run_problem(config, name), names))
    return [run_problem(config, name) for name in names]

####################
#
# Outputs
#
####################

def result_path(output_dir: str | _pathlib.Path, problem: str, strategy: Strategy) -> _pathlib.Path:
    return _pathlib.Path(output_dir) / f"{problem}_{strategy.value}.json"

def write_problem_results(run: ProblemRun, output_dir: str | _pathlib.Path) -> list[_pathlib.Path]:
    return [save_result(r.result, result_path(output_dir, run.name, r.strategy), r.json_extra(run.seed))
            for r in run.runs]

def write_comparison(runs: list[ProblemRun], output_dir: str | _pathlib.Path) -> tuple[_pathlib.Path, _pathlib.Path]:
    """comparison.csv (one row per problem x strategy) and summary.csv (accuracy sums per strategy)."""
    rows = [r.comparison_row() for run in runs for r in run.runs]
    output_dir = _pathlib.Path(output_dir)
    return write_comparison_csv(rows, output_dir / "comparison.csv"), write_summary_csv(rows, output_dir / "summary.csv")

def fully_decided(decision: ThresholdDecision) -> bool:
    return decision.verdict in (Verdict.FULLY_SEPARABLE, Verdict.FULLY_NONSEPARABLE)
