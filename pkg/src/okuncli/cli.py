"""Command-line entry point: ``okuncli run script.inp``, ``okuncli -e CMD``, ``okuncli repl``."""

from __future__ import annotations

import argparse
import os
import sys

from . import scriptlang
from .errors import OkunError, ParseError
from .session import Session, run_file

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_RUNTIME = 2


def _common_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", metavar="DIR", default=default,
                        help="directory for plot files (default: $OKUNCLI_OUT or the current directory)")
    parser.add_argument("--seed", type=int, default=default,
                        help="override every 'set seed' in the script")
    parser.add_argument("--echo", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="echo each command before its output")
    parser.add_argument("--data", metavar="CSV", default=default,
                        help="open this CSV before running anything")


def build_parser():
    p = argparse.ArgumentParser(
        prog="okuncli",
        description="Run gretl-style econometrics scripts (OLS, ADF, Engle-Granger, BG tests).",
    )
    p.add_argument("-e", "--execute", metavar="CMD", action="append",
                   help="execute one command line (repeatable)")
    _common_options(p, suppress=False)
    sub = p.add_subparsers(dest="mode")
    r = sub.add_parser("run", help="run a script file")
    r.add_argument("script")
    _common_options(r, suppress=True)
    _common_options(sub.add_parser("repl", help="read commands from standard input"), suppress=True)
    return p


def _outdir(args):
    return args.out or os.environ.get("OKUNCLI_OUT") or os.getcwd()


def _write(text):
    sys.stdout.write(text)
    if not text.endswith("\n\n"):
        sys.stdout.write("\n")
    sys.stdout.flush()


def _error(msg, code):
    print(f"okuncli: {msg}", file=sys.stderr)
    return code


def _repl(session, stream, interactive):
    status = EXIT_OK
    lineno = 0
    for raw in stream:
        lineno += 1
        try:
            program = scriptlang.parse_source(raw)
            session.execute(program)
        except ParseError as exc:
            _error(f"line {lineno}: {exc}" if exc.line is None else str(exc), 0)
            status = EXIT_PARSE
        except OkunError as exc:
            _error(str(exc), 0)
            status = EXIT_RUNTIME
        if interactive:
            sys.stdout.write("? ")
            sys.stdout.flush()
        elif status != EXIT_OK:
            return status
    return status


def main(argv=None):
    """Parse ``argv`` and run; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.mode is None and not args.execute:
        parser.print_usage(sys.stderr)
        return _error("nothing to do: give 'run SCRIPT', 'repl' or -e CMD", EXIT_PARSE)

    session = Session(seed_override=args.seed, sink=_write, echo=args.echo, outdir=_outdir(args))
    try:
        if args.data:
            session.execute(scriptlang.parse_source(f'open "{args.data}"'))
        for line in args.execute or []:
            session.execute(scriptlang.parse_source(line))
        if args.mode == "run":
            if not os.path.isfile(args.script):
                return _error(f"cannot read script '{args.script}': no such file", EXIT_RUNTIME)
            run_file(args.script, session)
        elif args.mode == "repl":
            interactive = sys.stdin.isatty()
            if interactive:
                sys.stdout.write("? ")
                sys.stdout.flush()
            return _repl(session, sys.stdin, interactive)
    except ParseError as exc:
        return _error(str(exc), EXIT_PARSE)
    except OkunError as exc:
        return _error(str(exc), EXIT_RUNTIME)
    except OSError as exc:
        return _error(str(exc), EXIT_RUNTIME)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
