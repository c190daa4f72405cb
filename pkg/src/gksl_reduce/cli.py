"""Command-line front end: ``gksl-reduce {reduce,validate,sweep,zoo}``.

Exit codes: 0 success, 1 usage or parse error, 2 the fast generator violates
the gap/semisimplicity hypotheses, 3 the recursion or the reduced regime
broke down.  The log level comes from ``GKSL_REDUCE_LOG_LEVEL``.
"""

import argparse
import csv
import json
import logging
import os
import sys

from . import __version__
from .exceptions import (
    DegenerateBasisError,
    ExponentialRangeError,
    HypothesisViolatedError,
    IllConditionedSplitError,
    NonSemisimpleKernelError,
    RecursionInconsistencyError,
    ReductionError,
    RegimeExceededError,
    SingularResolventError,
)
from .io import ModelFileError, load_model, model_to_dict, write_json
from .reports import (
    CSV_COLUMNS,
    Settings,
    build_reduce_report,
    build_sweep_report,
    build_validate_report,
    run_sweep,
)
from .zoo import ZOO, two_photon_rank_check, zoo_build

logger = logging.getLogger("gksl_reduce")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_BREAKDOWN = 3

_HYPOTHESIS_ERRORS = (HypothesisViolatedError, NonSemisimpleKernelError, DegenerateBasisError,
                      IllConditionedSplitError)
_BREAKDOWN_ERRORS = (RecursionInconsistencyError, SingularResolventError, RegimeExceededError,
                     ExponentialRangeError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; route it to exit code 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")
    return values


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _tolerance_flags(p):
    p.add_argument("--zero-tol", type=_positive_float, dest="zero_tol")
    p.add_argument("--residual-tol", type=_positive_float, dest="residual_tol")
    p.add_argument("--resolvent-tol", type=_positive_float, dest="resolvent_tol")
    p.add_argument("--max-order", type=int, dest="max_order")
    p.add_argument("--seed", type=int)


def build_parser():
    parser = _Parser(prog="gksl-reduce", description="Adiabatic elimination of slow/fast GKSL models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="spectral split and both expansions")
    p.add_argument("model", help="model file (JSON)")
    p.add_argument("--order", type=int)
    p.add_argument("--out", default="-", help="report path, '-' for stdout")
    _tolerance_flags(p)

    p = sub.add_parser("validate", help="reduce, then check against exact propagation")
    p.add_argument("model")
    p.add_argument("--order", type=int)
    p.add_argument("--tbar", type=_positive_float, default=1.0, help="slow horizon (time tbar/eps)")
    p.add_argument("--tgrid", type=_float_list, help="comma-separated times for the closeness fit")
    p.add_argument("--epsilons", type=_float_list, help="eps grid for the scaling checks")
    p.add_argument("--out", default="-")
    _tolerance_flags(p)

    p = sub.add_parser("sweep", help="errors over an (epsilon, order) grid")
    p.add_argument("model")
    p.add_argument("--epsilons", type=_float_list, required=True)
    p.add_argument("--orders", type=_int_list, default=[1, 2, 3])
    p.add_argument("--time", type=_positive_float, help="propagation time (default 10/gamma)")
    p.add_argument("--csv", help="CSV output path ('-' for stdout)")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--workers", type=int, default=1)
    _tolerance_flags(p)

    p = sub.add_parser("zoo", help="list benchmark models or write one as a model file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--list", action="store_true")
    group.add_argument("--emit", nargs=2, metavar=("NAME", "PATH"))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override a builder parameter (repeatable)")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _settings(args, model_file):
    flags = {k: getattr(args, k, None) for k in ("order", "zero_tol", "residual_tol", "resolvent_tol",
                                                 "max_order", "seed")}
    settings = Settings.resolve(model_file, **flags)
    if settings.order < 1:
        raise UsageError("--order must be >= 1")
    return settings


def cmd_reduce(args):
    model_file = load_model(args.model)
    write_json(build_reduce_report(model_file, _settings(args, model_file)), args.out)


def cmd_validate(args):
    model_file = load_model(args.model)
    if args.tgrid is not None and (not args.tgrid or min(args.tgrid) < 0):
        raise UsageError("--tgrid must list nonnegative times")
    if args.epsilons is not None and (len(args.epsilons) < 2 or min(args.epsilons) <= 0):
        raise UsageError("--epsilons needs at least two positive values")
    report = build_validate_report(model_file, _settings(args, model_file), args.tbar, args.tgrid, args.epsilons)
    write_json(report, args.out)


def write_csv(records, path):
    fh = sys.stdout if path == "-" else open(path, "w", newline="", encoding="utf-8")
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            # repr keeps every float bit-exact on re-read
            writer.writerow(["" if getattr(r, c) is None else repr(getattr(r, c)) for c in CSV_COLUMNS])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_sweep(args):
    if not args.epsilons:
        raise UsageError("--epsilons must list at least one value")
    if min(args.epsilons) <= 0:
        raise UsageError("--epsilons values must be positive")
    if not args.orders or min(args.orders) < 1:
        raise UsageError("--orders must list integers >= 1")
    model_file = load_model(args.model)
    settings = _settings(args, model_file)
    result = run_sweep(model_file, settings, args.epsilons, args.orders, args.time, args.workers)
    if args.csv:
        write_csv(result.records, args.csv)
    if args.out or not args.csv:
        write_json(build_sweep_report(model_file, settings, result), args.out or "-")


def _parse_params(pairs):
    params = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            raise UsageError(f"--param {key}: {value!r} is not a number")
    return params


def cmd_zoo(args):
    if args.list:
        listing = []
        for entry in ZOO.values():
            item = {"name": entry.name, "description": entry.description,
                    "params": entry.params, "expected": entry.expected}
            if entry.name == "two_photon_loss":
                item["truncation_check"] = two_photon_rank_check(entry.params["n_max"], entry.params["kappa2"])
            listing.append(item)
        write_json({"models": listing}, "-")
        return
    name, path = args.emit
    params = _parse_params(args.param)
    try:
        model = zoo_build(name, **params)
    except KeyError as exc:
        raise UsageError(exc.args[0])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))
    data = model_to_dict(model, args.order, None, args.seed, name=name,
                         params={**ZOO[name].params, **params})
    write_json(data, path)


COMMANDS = {"reduce": cmd_reduce, "validate": cmd_validate, "sweep": cmd_sweep, "zoo": cmd_zoo}


def main(argv=None):
    level = getattr(logging, os.environ.get("GKSL_REDUCE_LOG_LEVEL", "WARNING").upper(), None)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (UsageError, ModelFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _HYPOTHESIS_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except _BREAKDOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except ReductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
