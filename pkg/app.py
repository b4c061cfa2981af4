"""
Command line for the two-domain relaxation simulator.

    python app.py run scenarios/fig2a.toml --output results/
    python app.py sweep scenarios/fig3a.toml --n-range 100 1000 100
    python app.py oracle scenarios/fig4c.toml --csv

Reports go to stdout, diagnostics to stderr. Exit status: 0 success,
1 I/O failure, 2 validation error, 3 integration failure or partial sweep.
"""

import argparse
import logging
import sys
import os
from typing import List, Optional

from pydantic import ValidationError

# Add the project root to Python path for absolute imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from domain_relaxation.core.solver import IntegrationError
from domain_relaxation.experiments.relaxation import FitError
from domain_relaxation.experiments.runner import run
from domain_relaxation.experiments.scenario import ScenarioValidationError
from domain_relaxation.experiments.sweep import run_sweep
from domain_relaxation.physics.initial_config import UnsupportedInputError
from domain_relaxation.physics.sector_oracle import decompose, effective_temperature_k, steady_state
from domain_relaxation.physics.spin_algebra import SpinDomainError
from relaxation_app.config.app_config import (
    EXIT_INTEGRATION_ERROR,
    EXIT_IO_ERROR,
    EXIT_OK,
    EXIT_VALIDATION_ERROR,
    AppConfig
)
from relaxation_app.services.export_service import ExportService
from relaxation_app.services.scenario_service import ScenarioService
from relaxation_app.utils.validation import to_scenario_error

logger = logging.getLogger("relaxation_app")

VALIDATION_ERRORS = (ScenarioValidationError, SpinDomainError, UnsupportedInputError, FitError)


def cmd_run(args: argparse.Namespace, config: AppConfig) -> int:
    """Run a scenario and write one CSV per method."""
    scenario = ScenarioService.load(args.scenario, args.override)
    results = run(scenario, config.exact_memory_bytes)
    for method, series in results.items():
        path = ExportService.write_series(series, ExportService.series_path(args.output, scenario.name, method))
        final = series.final()
        print(
            f"{path}  method={method} converged={series.converged} "
            f"t_end={final['t_s']:.6g} s jz1={final['jz1']:.10g} jz2={final['jz2']:.10g}"
        )
    return EXIT_OK


def _n_values(args: argparse.Namespace) -> Optional[List[int]]:
    if args.n_values:
        return args.n_values
    if args.n_range:
        start, stop, step = args.n_range
        if step <= 0 or stop < start:
            raise ScenarioValidationError(f"invalid range {start}..{stop} step {step}", key="sweep.n_values")
        return list(range(start, stop + 1, step))
    return None


def cmd_sweep(args: argparse.Namespace, config: AppConfig) -> int:
    """Relaxation times over N, written as tau.csv and fit.txt."""
    scenario = ScenarioService.load(args.scenario, args.override)
    workers = args.workers if args.workers is not None else config.max_workers
    result = run_sweep(scenario, _n_values(args), max_workers=workers, memory_budget_bytes=config.exact_memory_bytes)
    paths = ExportService.write_sweep(scenario.name, result, args.output)
    for path in paths:
        print(path)
    if result.fit is not None:
        print(f"a={result.fit.a:.10g} s  b={result.fit.b:.10g} s  R^2={result.fit.r_squared:.6f}")
    if not result.complete:
        failed = ", ".join(str(f.n) for f in result.failures)
        print(f"sweep incomplete: N={failed} failed", file=sys.stderr)
        return EXIT_INTEGRATION_ERROR
    return EXIT_OK


def _effective_temperature(jz: float, n_spins: int, spin_frequency_hz: float) -> float:
    if n_spins == 0:
        return float("nan")
    return effective_temperature_k(jz, n_spins, spin_frequency_hz)


def cmd_oracle(args: argparse.Namespace, config: AppConfig) -> int:
    """Sector table and composed steady values of a product initial state."""
    scenario = ScenarioService.load(args.scenario, args.override)
    domains = scenario.domain_pair()
    reservoir = scenario.reservoir_spec()
    decomposition = decompose(domains, scenario.initial)
    prediction = steady_state(domains, scenario.initial, reservoir)
    if args.csv:
        sys.stdout.write(ExportService.oracle_to_csv(prediction))
        return EXIT_OK
    temperatures = (
        _effective_temperature(prediction.jz1, domains.n1, reservoir.spin_frequency_hz),
        _effective_temperature(prediction.jz2, domains.n2, reservoir.spin_frequency_hz),
    )
    sys.stdout.write(ExportService.render_oracle(decomposition, prediction, temperatures))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domain-relax",
        description="Collective relaxation of two spin domains through a shared reservoir"
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default from env)")
    commands = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name: str, help_text: str) -> argparse.ArgumentParser:
        command = commands.add_parser(name, help=help_text)
        command.add_argument("scenario", help="Scenario TOML file")
        command.add_argument(
            "--override", action="append", default=[], metavar="KEY=VALUE",
            help="Override a scenario key (dotted path or unique leaf name); repeatable"
        )
        return command

    run_parser = scenario_command("run", "Integrate a scenario and write CSV series")
    run_parser.add_argument("--output", default="results", help="Output directory")
    run_parser.set_defaults(handler=cmd_run)

    sweep_parser = scenario_command("sweep", "Relaxation times over the domain size and the a/N + b fit")
    sizes = sweep_parser.add_mutually_exclusive_group()
    sizes.add_argument("--n-values", type=int, nargs="+", help="Explicit domain sizes")
    sizes.add_argument("--n-range", type=int, nargs=3, metavar=("START", "STOP", "STEP"), help="Inclusive range")
    sweep_parser.add_argument("--workers", type=int, default=None, help="Worker processes (default from env)")
    sweep_parser.add_argument("--output", default="results", help="Output directory")
    sweep_parser.set_defaults(handler=cmd_sweep)

    oracle_parser = scenario_command("oracle", "Analytic steady state from the sector decomposition")
    oracle_parser.add_argument("--csv", action="store_true", help="Print sector rows as CSV")
    oracle_parser.set_defaults(handler=cmd_oracle)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = AppConfig()
    if args.log_level:
        config.log_level = args.log_level.upper()
    logging.basicConfig(
        level=getattr(logging, config.log_level, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )

    try:
        return args.handler(args, config)
    except ValidationError as e:
        error = to_scenario_error(e)
        print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR
    except VALIDATION_ERRORS as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR
    except IntegrationError as e:
        print(f"integration failed at t={e.last_good_time_s}: {e}", file=sys.stderr)
        return EXIT_INTEGRATION_ERROR
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
