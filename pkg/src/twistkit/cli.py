"""Command line entry point: ``twistkit check | example | validate``."""

from __future__ import annotations

import argparse
import sys

from .checks import DEFAULT_SEED, machine_report, run_checks, text_report
from .exterior import ModelError, validate_model
from .modelfile import format_model_file, parse_model_file
from .parsing import ParseError
from .zoo import UnknownExampleError, make_example

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _read(path: str):
    if path == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return parse_model_file(data)


def _load(path: str):
    """Parse a file, printing a diagnostic and returning None on failure."""
    try:
        return _read(path)
    except OSError as exc:
        print(f"twistkit: cannot read {path}: {exc.strerror or exc}", file=sys.stderr)
    except (ParseError, ModelError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"{path}: {msg}", file=sys.stderr)
    return None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistkit", description="Exact checks for torus twists of coframe models.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run the checks listed in a model file")
    c.add_argument("file")
    c.add_argument("--only", help="comma separated check names to run")
    c.add_argument("--format", choices=("text", "machine"), default="text")
    c.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    c.add_argument("--jobs", type=int, default=1, help="run checks on this many threads")

    e = sub.add_parser("example", help="describe or print a registry example")
    e.add_argument("name")
    e.add_argument("--emit-model", action="store_true", help="print the example as a model file")

    v = sub.add_parser("validate", help="parse a file and check d^2 = 0")
    v.add_argument("file")
    return p


def _cmd_check(args) -> int:
    mf = _load(args.file)
    if mf is None:
        return EXIT_ERROR
    only = {s.strip() for s in args.only.split(",") if s.strip()} if args.only else None
    reports = run_checks(mf, only, seed=args.seed, jobs=max(1, args.jobs))
    render = machine_report if args.format == "machine" else text_report
    sys.stdout.write(render(reports, args.file, mf.name, args.seed))
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_example(args) -> int:
    try:
        ex = make_example(args.name)
    except UnknownExampleError as exc:
        print(f"twistkit: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.emit_model:
        sys.stdout.write(format_model_file(ex.to_model_file()))
        return EXIT_PASS
    print(f"{ex.name}: {ex.notes}")
    print(f"  coframe: {', '.join(ex.model.coframe)}")
    if ex.model.coordinates:
        print(f"  coordinates: {', '.join(ex.model.coordinates)}")
    if ex.twist is not None:
        print(f"  twist rank: {ex.twist.rank}")
    for e in ex.expectations:
        print(f"  expect {'pass' if e.passed else 'fail'}: {e.call}")
    return EXIT_PASS


def _cmd_validate(args) -> int:
    mf = _load(args.file)
    if mf is None:
        return EXIT_ERROR
    rep = validate_model(mf.model)
    for name, ok in rep.checks.items():
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    for name, value in rep.witnesses.items():
        print(f"     {name} = {mf.model.format(value)}")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"check": _cmd_check, "example": _cmd_example, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except BrokenPipeError:
        return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
