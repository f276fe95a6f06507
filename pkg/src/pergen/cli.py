"""Command line front-end for the verification experiments.

Every experiment is a subcommand. Options can be given as flags or in a JSON configuration file
whose keys are the `RunConfig` field names; flags win on conflict.

Examples
--------

.. code-block:: console

    $ pergen weyl-check --n-max 5 --y-count 8 --bandwidth 64 --seed 7
    $ pergen classify-net --net residual --eps 0.8,0.6,0.5,0.4,0.3,0.25,0.2 --qmax 8 --plot
    $ pergen min-uncertainty --eps 0.4,0.2,0.1,0.05 --format json --no-timestamp
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .__about__ import version
from .experiments import run_experiment
from .options import SUBCOMMANDS, Parallelization, RunConfig
from .reports import emit_plot_data, write_report

_logger = logging.getLogger("pergen.cli")
_logger.addHandler(logging.NullHandler())

EXIT_PASSED = 0
EXIT_FAILED = 1

_HELP = {
    "coeffs": "wrapped Gaussian quadrature coefficients against the closed form",
    "pair": "Dirac pairings and the angle eigen-relation",
    "sesquilinear": "orthogonality of Dirac measures under the generalised product",
    "weyl-check": "Weyl relation defects of the ladder and rotation groups",
    "decompose": "eigenoperator decompositions of the angle operator",
    "classify-net": "moderate/negligible classification of a net",
    "associate": "association of a net with a distribution",
    "min-uncertainty": "uncertainty products of the wrapped Gaussian states",
    "shift-check": "mean direction and angular momentum of shifted states",
}


def _parallelization(text: str) -> Parallelization:
    return "cores" if text == "cores" else int(text)


def _json_or_kind(text: str) -> dict[str, Any]:
    if text.lstrip().startswith("{"):
        value = json.loads(text)

        if not isinstance(value, dict):
            raise argparse.ArgumentTypeError("expected a JSON object")

        return value

    return {"kind": text}


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)

    sweep = parser.add_argument_group("sweep")
    sweep.add_argument("--eps", help="comma separated ε grid")
    sweep.add_argument("--bandwidth", type=int, help="bandwidth N of states and test functions")
    sweep.add_argument("--quadrature", type=int, help="quadrature size M")
    sweep.add_argument("--wrap", type=int, help="wrap truncation K of Gaussian combs")
    sweep.add_argument("--n-max", dest="n_max", type=int, help="largest ladder index")
    sweep.add_argument("--y-count", dest="y_count", type=int, help="number of rotation angles")
    sweep.add_argument("--trials", type=int, help="random states per sweep point")
    sweep.add_argument("--seed", type=int, help="seed of the random number generator")
    sweep.add_argument("--qmax", dest="q_max", type=int, help="largest negligibility power")
    sweep.add_argument("--jmax", dest="j_max", type=int, help="largest derivative order")
    sweep.add_argument("--moment-max", dest="moment_max", type=int, help="largest angle moment")
    sweep.add_argument("--theta", help="comma separated angles of the pairing sweep")
    sweep.add_argument("--theta-count", dest="theta_count", type=int, help="angle grid size")
    sweep.add_argument("--net", type=_json_or_kind, help="net kind or JSON description")
    sweep.add_argument("--distribution", type=_json_or_kind, help="distribution in JSON form")
    sweep.add_argument("--tests", help="comma separated indices k of the tests e_k + e_-k")
    sweep.add_argument("--shifts", help="comma separated angle:momentum pairs")

    checks = parser.add_argument_group("tolerances")
    checks.add_argument("--tolerance", type=float, help="declared tolerance of the experiment")
    checks.add_argument("--theta-tolerance", dest="theta_tolerance", type=float)
    checks.add_argument("--momentum-tolerance", dest="momentum_tolerance", type=float)
    checks.add_argument("--consistency-tolerance", dest="consistency_tolerance", type=float)
    checks.add_argument(
        "--schwartz-floor", dest="schwartz_floor", type=float, help="smallest admissible slack"
    )
    checks.add_argument(
        "--monotone-rtol", dest="monotone_rtol", type=float, help="relative slack of trend checks"
    )
    checks.add_argument(
        "--monotone-atol", dest="monotone_atol", type=float, help="absolute slack of trend checks"
    )

    output = parser.add_argument_group("output")
    output.add_argument("--config", dest="config_file", type=Path, help="JSON configuration")
    output.add_argument("--output", type=Path, help="report file")
    output.add_argument("--format", dest="output_format", choices=("csv", "json"))
    output.add_argument(
        "--no-timestamp", dest="timestamp", action="store_false", help="omit the timestamp line"
    )
    output.add_argument("--plot", action="store_true", help="write plot data next to the report")
    output.add_argument("--processes", type=_parallelization, help="process count or 'cores'")
    output.add_argument("--threads", type=_parallelization, help="thread count or 'cores'")
    output.add_argument("--verbose", action="store_true", help="log progress to stderr")

    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pergen",
        description="Verification experiments for periodic generalised functions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {version}")

    common = _common_parser()
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="experiment")

    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=_HELP[name])

    return parser


def _load_config_file(path: Path) -> dict[str, Any]:
    values = json.loads(path.read_text(encoding="utf-8"))

    if not isinstance(values, dict):
        raise ValueError(f"configuration file {path} must hold a JSON object")

    return values


def _enable_logging() -> None:
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s: %(message)s"))

    logger = logging.getLogger("pergen")
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG)


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse flags into a `RunConfig`, exiting with status 2 on a usage error."""

    parser = build_parser()
    args = vars(parser.parse_args(argv))
    subcommand = args.pop("subcommand")
    config_file = args.pop("config_file", None)

    if args.pop("verbose", False):
        _enable_logging()

    values: dict[str, Any] = {}

    try:
        if config_file is not None:
            values.update(_load_config_file(config_file))

        values.update(args)
        values["subcommand"] = subcommand
        return RunConfig.from_mapping(values)
    except (OSError, TypeError, ValueError) as e:
        parser.error(str(e))


def run(config: RunConfig) -> int:
    """Run an experiment, write its report and return the exit status.

    :returns: 0 when every declared check passes, 1 otherwise
    """

    try:
        report = run_experiment(config)
    except ValueError as e:
        _logger.error(f"'{config.subcommand}' could not be completed: {e}")
        print(f"pergen {config.subcommand}: error: {e}", file=sys.stderr)
        return EXIT_FAILED

    path = write_report(
        report, config.output_path(), config.output_format, timestamp=config.timestamp
    )

    if config.plot:
        emit_plot_data(report, path.with_suffix(".plot.csv"))

    if report.passed:
        return EXIT_PASSED

    for record in report.failures:
        print(f"FAILED {record.experiment} {record.inputs} {record.outputs}", file=sys.stderr)

    for name in report.failed_checks:
        print(f"FAILED {report.experiment} check '{name}'", file=sys.stderr)

    return EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
