"""
Linea de comandos: validate, run y replay.

Codigos de salida
-------------------
    0: correcto
    1: fallo en tiempo de ejecucion (incluye el paso en el que fallo)
    2: error de configuracion (escenario, traza, hash o argumentos)

La carpeta de salida por defecto es CONF.DEV.OUTPUT_DIR/<nombre del escenario>;
la variable de proceso SITAWARE_OUTPUT_DIR sustituye a CONF.DEV.OUTPUT_DIR.
"""
from __future__ import annotations
import argparse
import os
import sys
from typing import Optional, Sequence

from cli.replay import METRICS, replay
from cli.runner import RunFailure, run_scenario
from cli.schema import ValidationReport, validate_file
from configs.package import CONF
from utils.errors import ConfigHashMismatchError, ConfigurationError, TraceSchemaError
from utils.logger import get_logger

log = get_logger("CLI")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _parse_args(argv: Optional[Sequence[str]]) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="sitaware", description="Situational-awareness multi-agent simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("config", help="scenario JSON")

    p_run = sub.add_parser("run", help="run a scenario and write its artifacts")
    p_run.add_argument("config", help="scenario JSON")
    p_run.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
    p_run.add_argument("--output", default=None, help="output directory")

    p_replay = sub.add_parser("replay", help="recompute a metric series from a trace")
    p_replay.add_argument("trace", help="trace.csv written by run")
    p_replay.add_argument("--metric", required=True, choices=sorted(METRICS))
    p_replay.add_argument("--scenario", default=None, help="scenario JSON (default: from manifest.json)")
    p_replay.add_argument("--force", action="store_true", help="accept a config hash mismatch")
    return parser.parse_args(argv)


def output_root() -> str:
    return os.environ.get(CONF.DEV.OUTPUT_DIR_ENV) or CONF.DEV.OUTPUT_DIR


def _print_diagnostics(report: ValidationReport) -> None:
    for diag in report.diagnostics:
        print(f"{report.path}: {diag}", file=sys.stderr)


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_file(args.config)
    if not report.ok:
        _print_diagnostics(report)
        return EXIT_CONFIG
    print(f"{args.config}: ok ({report.scenario.case})")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    report = validate_file(args.config)
    if not report.ok:
        _print_diagnostics(report)
        return EXIT_CONFIG
    scenario = report.scenario
    output_dir = args.output or os.path.join(output_root(), scenario.name)
    try:
        artifacts = run_scenario(scenario, report.raw, output_dir, report.path, args.seed)
    except RunFailure as err:
        print(f"{args.config}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except ConfigurationError as err:
        print(f"{args.config}: {err}", file=sys.stderr)
        return EXIT_CONFIG
    for kind, path in sorted(artifacts.files.items()):
        print(f"{kind}: {path}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        series = replay(args.trace, args.metric, args.scenario, args.force)
    except (TraceSchemaError, ConfigHashMismatchError, ConfigurationError) as err:
        print(f"{args.trace}: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"{args.trace}: {err}", file=sys.stderr)
        return EXIT_CONFIG
    series.write_csv(sys.stdout)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "run": cmd_run,
    "replay": cmd_replay,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parse_args(argv)
    except SystemExit as exc:
        # argparse sale con 2 en argumentos invalidos y 0 con --help
        return int(exc.code or 0)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
