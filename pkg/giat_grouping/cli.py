##########################################################
# giat_grouping.cli
#
#   giat-grouping decompose | compare | dump-indicators
#
#   Exit codes: 0 success, 1 usage error, 2 runtime error.
#
#   Released under the MIT License.
#
##########################################################

import argparse as _argparse
import logging as _logging
import pathlib as _pathlib

from rich.console import Console as _Console
from rich.markup import escape as _escape
from rich.table import Table as _Table

from . import __version__
from .bench_suite import DimensionMismatchException, InvalidProblemSpecException
from .evaluation import EmptyDistributionException, append_comparison_row, dump_distribution, summarise, write_distribution_csv
from .experiment import (ConfigException, ExperimentConfig, ProblemRun, desk_suite_config, fully_decided, load_config,
                         run_experiment, run_problem, write_comparison, write_problem_results)
from .interaction import write_interaction_csv
from .thresholds import InvalidThresholdException, Strategy, Verdict, write_indicator_arrays
from .utilities import configure_logging, format_float, groups_to_string

logger = _logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

console = _Console()
err_console = _Console(stderr=True)

class UsageException(Exception):
    "Raised by the argument parser instead of exiting."
    pass

class _ArgumentParser(_argparse.ArgumentParser):
    def error(self, message):
        raise UsageException(f"{self.prog}: {message}")

####################
#
# Argument parsing
#
####################

def build_parser() -> _argparse.ArgumentParser:
    parser = _ArgumentParser(prog="giat-grouping",
                             description="Variable interaction detection and grouping for large-scale optimisation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment config JSON (default: bundled desk suite)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", metavar="N", type=int, help="master seed")
    common.add_argument("--workers", metavar="N", type=int, help="problems run concurrently")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="errors only")

    verbs = parser.add_subparsers(dest="command", metavar="COMMAND")
    verbs.required = True

    decompose = verbs.add_parser("decompose", parents=[common], help="decompose one problem with one strategy")
    decompose.add_argument("--problem", metavar="NAME", required=True)
    decompose.add_argument("--strategy", metavar="NAME", default=Strategy.GIAT.value,
                           help="FT, FST, CRET or GIAT (default: GIAT)")

    compare = verbs.add_parser("compare", parents=[common], help="run every problem with every strategy")
    compare.add_argument("--problem", metavar="NAME", action="append", help="restrict to a problem (repeatable)")
    compare.add_argument("--strategy", metavar="NAME", action="append", help="restrict to a strategy (repeatable)")

    dump = verbs.add_parser("dump-indicators", parents=[common], help="write the sorted GIAT indicator distribution")
    dump.add_argument("--problem", metavar="NAME", required=True)
    dump.add_argument("--pairs", action="store_true", help="also write per-pair tau, e_inf, e_sup")
    dump.add_argument("--arrays", action="store_true", help="also write Z and V as separate two-column files")
    return parser

def _log_level(args) -> int:
    if args.verbose:
        return _logging.DEBUG
    if args.quiet:
        return _logging.ERROR
    return _logging.WARNING

def resolve_config(args) -> ExperimentConfig:
    """Config file (or desk suite) with command-line overrides applied."""
    config = load_config(args.config) if args.config else desk_suite_config()
    # only compare takes repeatable --problem and --strategy
    problems = getattr(args, "problem", None)
    strategies = getattr(args, "strategy", None)
    problems = problems if isinstance(problems, list) else None
    strategies = strategies if isinstance(strategies, list) else None
    return config.with_overrides(output_dir=args.out, master_seed=args.seed, strategies=strategies,
                                 problems=problems, workers=args.workers)

####################
#
# Verbs
#
####################

def cmd_decompose(config: ExperimentConfig, problem: str, strategy: str) -> int:
    strategy = Strategy.parse(strategy)
    run = run_problem(config, problem, strategies=(strategy,))
    outcome = run.runs[0]
    out = _pathlib.Path(config.output_dir)
    path = write_problem_results(run, out)[0]
    append_comparison_row(outcome.comparison_row(), out / "comparison.csv")
    logger.info("wrote %s", path)
    result, report = outcome.result, outcome.report
    console.print(f"{problem}/{strategy.value}: verdict={outcome.decision.verdict.value} "
                  f"eps={outcome.decision.eps_record()} groups={len(result.nonsep_groups)} "
                  f"sep={len(result.sep_vars)} exact={report.accuracy} fe_used={outcome.fe_used}")
    if result.nonsep_groups:
        console.print(f"  groups: {groups_to_string(result.nonsep_groups)}")
    return EXIT_OK

def _comparison_table(runs: list[ProblemRun]) -> _Table:
    table = _Table(title="Decomposition comparison")
    for column in ("function_id", "strategy", "captured_sep", "captured_nonsep", "formed_groups", "accuracy", "fe_used"):
        table.add_column(column, justify="left" if column in ("function_id", "strategy") else "right")
    for run in runs:
        for r in run.runs:
            row = r.comparison_row()
            table.add_row(*(str(v) for v in row.csv_row()), str(row.fe_used),
                          style=None if r.report.exact else "red")
    return table

def cmd_compare(config: ExperimentConfig) -> int:
    runs = run_experiment(config)
    out = _pathlib.Path(config.output_dir)
    # single-threaded writes in config order
    for run in runs:
        write_problem_results(run, out)
    comparison, summary = write_comparison(runs, out)
    logger.info("wrote %s and %s", comparison, summary)
    console.print(_comparison_table(runs))
    rows = [r.comparison_row() for run in runs for r in run.runs]
    totals = summarise(rows)
    console.print("accuracy sums: " + "  ".join(f"{s}={hits}/{count}" for s, (hits, count) in totals.items()))
    return EXIT_OK

def cmd_dump_indicators(config: ExperimentConfig, problem: str, pairs: bool = False, arrays: bool = False) -> int:
    run = run_problem(config, problem, strategies=(Strategy.GIAT,))
    outcome = run.runs[0]
    out = _pathlib.Path(config.output_dir)
    if fully_decided(outcome.decision):
        verdict = "fully separable" if outcome.decision.verdict is Verdict.FULLY_SEPARABLE else "fully nonseparable"
        console.print(f"{problem}: {verdict}; no distribution")
        return EXIT_OK
    if pairs:
        write_interaction_csv(run.data, out / f"{problem}_pairs.csv")
    dump = dump_distribution(outcome.z, outcome.v, outcome.decision.scalar_eps)
    path = write_distribution_csv(dump, out / f"{problem}_indicators.csv")
    if arrays:
        write_indicator_arrays(outcome.z, outcome.v, out, stem=f"{problem}_indicators")
    logger.info("wrote %s", path)
    console.print(f"{problem}: {dump.z.size} indicators, gap at row {dump.gap_row} "
                  f"(Z={format_float(dump.gap_lower)}), gap_ratio={format_float(dump.gap_ratio)}")
    return EXIT_OK

####################
#
# Entry point
#
####################

def main(argv: list[str] | None = None) -> int:
    """Run the command line; returns the exit code instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageException as exc:
        err_console.print(f"[red]{_escape(str(exc))}[/red]")
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    configure_logging(_log_level(args))

    try:
        config = resolve_config(args)
        match args.command:
            case "decompose":
                return cmd_decompose(config, args.problem, args.strategy)
            case "compare":
                return cmd_compare(config)
            case "dump-indicators":
                return cmd_dump_indicators(config, args.problem, pairs=args.pairs, arrays=args.arrays)
    except (ConfigException, InvalidProblemSpecException, InvalidThresholdException) as exc:
        err_console.print(f"[red]error:[/red] {_escape(str(exc))}")
        return EXIT_USAGE
    except (OSError, RuntimeError, ArithmeticError, DimensionMismatchException, EmptyDistributionException) as exc:
        err_console.print(f"[red]error:[/red] {_escape(str(exc))}")
        return EXIT_RUNTIME
    return EXIT_USAGE
