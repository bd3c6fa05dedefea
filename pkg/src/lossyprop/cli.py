"""``lossyprop`` command line: run an experiment and write its table.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
On failure a one-line JSON error record is written to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .exceptions import ConfigError, NumericalError
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    format_csv,
    format_json,
    load_profile_file,
    run_experiment,
)

log = logging.getLogger("lossyprop")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit(2) on its own; route through the JSON error path instead
    def error(self, message):
        raise _ArgumentError(message)


class _LevelFormatter(logging.Formatter):
    COLORS = {"WARNING": "\033[33m", "ERROR": "\033[31m", "INFO": "\033[36m"}

    def __init__(self, color: bool):
        super().__init__("%(levelname)s %(message)s")
        self.color = color

    def format(self, record):
        text = super().format(record)
        code = self.COLORS.get(record.levelname)
        if self.color and code:
            text = text.replace(record.levelname, f"{code}{record.levelname}\033[0m", 1)
        return text


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    handler.setFormatter(_LevelFormatter(color))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _subspace(text: str) -> list[list[int]]:
    """``"0:0,1:0,0:1"`` -> ``[[0, 0], [1, 0], [0, 1]]``."""
    try:
        return [[int(a), int(b)] for a, b in (item.split(":") for item in text.split(","))]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected l:m pairs separated by commas, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=10, help="photon cutoff / N00N photon number")
    common.add_argument("--mu", type=float, help="extinction coefficient for both channels (1/km)")
    common.add_argument("--mu-a", type=float)
    common.add_argument("--mu-b", type=float)
    common.add_argument("--eta", type=float, help="phase-rotation coefficient for both channels (1/km)")
    common.add_argument("--eta-a", type=float)
    common.add_argument("--eta-b", type=float)
    common.add_argument("--profile", metavar="FILE",
                        help="piecewise-constant medium JSON: list of {until_km, mu, eta}")
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", dest="output_path", metavar="PATH",
                        help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    sweep = _Parser(add_help=False)
    sweep.add_argument("--x-min", type=float, default=0.0)
    sweep.add_argument("--x-max", type=float)
    sweep.add_argument("--steps", type=int, default=101)
    sweep.add_argument("--window", type=int, default=5, help="plateau fit window (points)")
    sweep.add_argument("--ratio", type=float, default=0.8, help="plateau slope ratio threshold")

    ensemble = _Parser(add_help=False)
    ensemble.add_argument("--count", type=int, default=25)
    ensemble.add_argument("--seed", type=int, default=20100101)
    ensemble.add_argument("--distribution", choices=("box", "sphere"), default="sphere")
    ensemble.add_argument("--subspace", type=_subspace,
                          help="restrict random coefficients to l:m pairs, e.g. 0:0,1:1")

    parser = _Parser(prog="lossyprop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    sub.add_parser("noon-decay", parents=[common, sweep], help="N00N coherence/negativity sweep")
    sub.add_parser("ensemble-coherence", parents=[common, sweep, ensemble],
                   help="random-ensemble coherence sweep with plateau detection")
    sub.add_parser("ensemble-negativity", parents=[common, sweep, ensemble],
                   help="random-ensemble negativity sweep with N00N reference")
    single = sub.add_parser("single-mode", parents=[common], help="Fock state populations at one distance")
    single.add_argument("--x", type=float, default=1.0)
    oracle = sub.add_parser("oracle-convergence", parents=[common],
                            help="finite beam-splitter chain vs continuum error")
    oracle.add_argument("--depth", type=float, default=1.0)
    oracle.add_argument("--m", dest="m_values", type=_int_list, default=[10, 100, 1000, 10000])
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    opts = vars(args).copy()
    opts.pop("verbose", None)
    mu, eta = opts.pop("mu"), opts.pop("eta")
    for side in ("a", "b"):
        if opts[f"mu_{side}"] is None:
            opts[f"mu_{side}"] = 0.2 if mu is None else mu
        if opts[f"eta_{side}"] is None:
            opts[f"eta_{side}"] = 1.0 if eta is None else eta
    profile_path = opts.pop("profile")
    opts["profile"] = load_profile_file(profile_path) if profile_path else None
    return ExperimentConfig(**{k: v for k, v in opts.items() if v is not None or k == "profile"})


def _fail(code: int, exc: BaseException) -> int:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    context = getattr(exc, "context", None)
    if context:
        record["context"] = context
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        return _fail(EXIT_CONFIG, ConfigError(str(exc)))
    _setup_logging(args.verbose)
    try:
        config = config_from_args(args)
        log.info("running %s", config.experiment)
        result = run_experiment(config)
        text = format_csv(result) if config.output_format == "csv" else format_json(result)
        if config.output_path:
            with open(config.output_path, "w") as fh:
                fh.write(text)
            log.info("wrote %d records to %s", len(result.rows), config.output_path)
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
