"""Command line interface.

    momsec check MODEL.json [--suite S] [--format json|text]
                            [--tol T] [--points N] [--seed S] [--require-h1]
    momsec examples list
    momsec examples emit NAME PATH

Exit codes: 0 all required checks pass, 1 a required check failed,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys

from .fixtures import fixture_bytes, fixture_names
from .modelfile import ModelError, load_model
from .reporting import CheckReport
from .suites import RunConfig, SuiteError, run

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momsec",
        description="Certify momentum-section and related structures on a single-chart model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run verification suites on a model file")
    check.add_argument("model", help="path to a model JSON file")
    check.add_argument(
        "--suite",
        default="all",
        choices=["axioms", "momentum", "mechanics", "sigma2d", "multisym", "all"],
        help="which suite to run (default: all applicable)",
    )
    check.add_argument("--format", default="text", choices=["text", "json"], help="report format")
    check.add_argument("--tol", type=float, default=None, help="override the residual tolerance")
    check.add_argument("--points", type=int, default=None, help="override the sample point count")
    check.add_argument("--seed", type=int, default=None, help="override the sampling seed")
    check.add_argument(
        "--require-h1",
        action="store_true",
        help="treat the anchoring conditions (H1, HM1) as required instead of informational",
    )

    examples = sub.add_parser("examples", help="list or write the built-in example models")
    exsub = examples.add_subparsers(dest="examples_command", required=True)
    exsub.add_parser("list", help="list available example names")
    emit = exsub.add_parser("emit", help="write an example model file")
    emit.add_argument("name", help="example name")
    emit.add_argument("path", help="output path")
    return parser


def cmd_check(args) -> int:
    try:
        model = load_model(args.model)
    except OSError as exc:
        print(f"error: cannot read model: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"error: invalid model: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cfg = RunConfig(
        tolerance=args.tol if args.tol is not None else model.tolerance,
        points=args.points if args.points is not None else model.sampling.points,
        seed=args.seed if args.seed is not None else model.sampling.seed,
        require_h1=args.require_h1,
    )
    if cfg.tolerance <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    if cfg.points < 1:
        print("error: --points must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        report: CheckReport = run(model, args.suite, cfg)
    except SuiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.to_text())
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def cmd_examples(args) -> int:
    if args.examples_command == "list":
        for name in fixture_names():
            print(name)
        return EXIT_PASS
    try:
        payload = fixture_bytes(args.name)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        print(f"error: cannot write {args.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_PASS


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    if args.command == "check":
        return cmd_check(args)
    return cmd_examples(args)


if __name__ == "__main__":
    sys.exit(main())
