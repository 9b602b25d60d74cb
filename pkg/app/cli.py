"""
Command-line entry point: run, sweep, oracle, validate and serve
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from app.config import settings
from app.core.exceptions import HerculesException, InvalidScenario
from app.core.logging import configure_logging
from app.services.scenario_service import (
    SWEEP_PARAMS,
    ExperimentRunner,
    load_scenario,
    oracle_document,
    parse_scenario,
    resolve_scenario,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hercules", description="Hercules congestion-control lab")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    parser.add_argument("--log-format", default=settings.LOG_FORMAT, choices=("json", "text"))
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="Run every trial of a scenario")
    run_cmd.add_argument("scenario", help="Scenario file or bundled scenario name")
    run_cmd.add_argument("--output-dir", default=None)
    run_cmd.add_argument("--trials", type=int, default=None)
    run_cmd.add_argument("--seed", type=int, default=None)
    run_cmd.add_argument("--workers", type=int, default=None)

    sweep_cmd = sub.add_parser("sweep", help="Run a scenario once per parameter value")
    sweep_cmd.add_argument("scenario")
    sweep_cmd.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sweep_cmd.add_argument("--values", required=True, type=float, nargs="+")
    sweep_cmd.add_argument("--output-dir", default=None)
    sweep_cmd.add_argument("--workers", type=int, default=None)

    oracle_cmd = sub.add_parser("oracle", help="Print HRF and MMF allocations of a scenario")
    oracle_cmd.add_argument("scenario")

    validate_cmd = sub.add_parser("validate", help="Check a scenario file")
    validate_cmd.add_argument("scenario")

    serve_cmd = sub.add_parser("serve", help="Start the HTTP service")
    serve_cmd.add_argument("--host", default=settings.HOST)
    serve_cmd.add_argument("--port", type=int, default=settings.PORT)
    return parser


def _load(args):
    config = parse_scenario(resolve_scenario(args.scenario))
    overrides = {}
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = load_scenario({**config.model_dump(mode="json"), **overrides})
    return config


def cmd_run(args) -> int:
    config = _load(args)
    runner = ExperimentRunner(output_dir=args.output_dir, max_workers=args.workers)
    _, report = runner.run_scenario(config)
    print(report.model_dump_json(indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load(args)
    runner = ExperimentRunner(output_dir=args.output_dir, max_workers=args.workers)
    aggregate = runner.sweep(config, args.param, args.values)
    print(json.dumps(aggregate, indent=2))
    return EXIT_OK


def cmd_oracle(args) -> int:
    print(json.dumps(oracle_document(_load(args)), indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    config = _load(args)
    print(f"{config.name}: valid ({len(config.connections)} connections, {config.duration:g}s)")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port, reload=settings.DEBUG)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    try:
        return COMMANDS[args.command](args)
    except InvalidScenario as e:
        for error in e.errors or [e.message]:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except HerculesException as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except Exception:
        logger.exception("Unhandled error")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
