"""
Command-line front end: run queries, check models, print enumeration traces.

Usage:
    python -m src.cli run data/models/rsg.prob
    python -m src.cli run data/models/rsg.prob --query "rain given grass_wet" --format float
    python -m src.cli check data/models/jobs.prob
    python -m src.cli trace data/models/ex3.prob

Exit codes: 0 success, 1 evaluation error, 2 parse/compile error, 3 oracle mismatch.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from src.compiler import CompiledModel, compile_query, load_model, run_queries
from src.config import (
    DEFAULT_FORMAT, FLOAT_DIGITS, OUTPUT_FORMATS, SKIP_BINDING_DEFAULT, validate_config,
)
from src.errors import DslError, StatuesError
from src.report import (
    export_detailed_json, export_summary_csv, render_pmf, render_trace, results_to_json,
    trace_frame,
)
from src.statues import marg_traced

EXIT_OK = 0
EXIT_EVALUATION = 1
EXIT_DSL = 2
EXIT_ORACLE_MISMATCH = 3


@dataclass
class CliConfig:
    command: str
    path: str
    queries: List[str] = field(default_factory=list)
    fmt: str = DEFAULT_FORMAT
    digits: int = FLOAT_DIGITS
    oracle: bool = False
    skip_binding: bool = SKIP_BINDING_DEFAULT
    full: bool = False
    export: bool = False
    verbose: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CliConfig':
        return cls(
            command=args.command,
            path=args.path,
            queries=args.query or [],
            fmt=args.format,
            digits=args.digits,
            oracle=getattr(args, 'oracle', False),
            skip_binding=getattr(args, 'skip_binding', SKIP_BINDING_DEFAULT),
            full=getattr(args, 'full', False),
            export=getattr(args, 'export', False),
            verbose=args.verbose,
        )


# =============================================
# OUTPUT HELPERS
# =============================================

def print_header(title: str) -> None:
    """Print formatted section header (stderr)."""
    print("\n" + "=" * 70, file=sys.stderr)
    print(f"  {title}", file=sys.stderr)
    print("=" * 70, file=sys.stderr)


def info(message: str) -> None:
    print(message, file=sys.stderr)


def report_dsl_error(err: DslError) -> None:
    for diag in err.diagnostics:
        info(f"❌ {diag}")


# =============================================
# SHARED STEPS
# =============================================

def read_source(path: str) -> str:
    """Model text from a file, or from stdin when path is '-'."""
    if path == '-':
        return sys.stdin.read()
    return Path(path).read_text(encoding='utf-8')


def load(config: CliConfig) -> CompiledModel:
    """
    Read, parse and compile the model.

    Raises:
        DslError: On parse/compile errors
        OSError: If the file cannot be read
    """
    filename = '<stdin>' if config.path == '-' else config.path
    return load_model(read_source(config.path), filename)


def selected_queries(config: CliConfig, compiled: CompiledModel):
    """--query texts replace the model's own queries."""
    if config.queries:
        return [compile_query(compiled, text) for text in config.queries]
    return compiled.queries


def _model_name(config: CliConfig) -> str:
    return 'stdin' if config.path == '-' else Path(config.path).stem


# =============================================
# COMMANDS
# =============================================

def cmd_run(config: CliConfig) -> int:
    """Evaluate every query and print one result per query."""
    compiled = load(config)
    queries = selected_queries(config, compiled)

    if config.verbose:
        print_header(f"RUNNING {len(queries)} QUERY(IES): {config.path}")

    results = run_queries(compiled, queries, oracle=config.oracle,
                          skip_binding=config.skip_binding)

    exit_code = EXIT_OK
    if config.fmt == 'json':
        print(json.dumps(results_to_json(results), indent=2, ensure_ascii=False))

    for r in results:
        if r.error is not None:
            info(f"❌ query `{r.source}` (line {r.span.line}): {r.error}")
            exit_code = max(exit_code, EXIT_EVALUATION)
        elif config.fmt != 'json':
            text = render_pmf(r.pmf, config.fmt, config.digits, config.full)
            print(text if len(results) == 1 else f"{r.source} => {text}")

        if config.verbose and r.ok:
            info(f"  ✓ {r.source}: {len(r.pmf)} value(s)")

        if config.oracle:
            if r.oracle_skipped:
                info(f"⚠️  oracle check skipped for `{r.source}`: {r.oracle_skipped}")
            elif r.mismatch:
                engine = r.pmf if r.pmf is not None else r.error
                oracle = r.oracle_pmf if r.oracle_pmf is not None else r.oracle_error
                info(f"❌ oracle mismatch on `{r.source}`: engine {engine!r}, oracle {oracle!r}")
                exit_code = EXIT_ORACLE_MISMATCH
            elif config.verbose:
                info(f"  ✓ oracle agrees on `{r.source}`")

    if config.export:
        name = _model_name(config)
        for written in (export_summary_csv(results, name), export_detailed_json(results, name)):
            if written:
                info(f"✓ Exported {written}")

    return exit_code


def cmd_check(config: CliConfig) -> int:
    """Parse and compile only; print a summary line."""
    compiled = load(config)
    print(f"{len(compiled.names)} definitions, {len(compiled.queries)} queries")
    return EXIT_OK


def cmd_trace(config: CliConfig) -> int:
    """Print the step table of a single query, then its result."""
    compiled = load(config)
    queries = selected_queries(config, compiled)
    if len(queries) != 1:
        info(f"❌ trace needs exactly one query, found {len(queries)}")
        return EXIT_DSL

    query = queries[0]
    if config.verbose:
        print_header(f"TRACE: {query.source}")

    try:
        pmf, events = marg_traced(query.root, skip_binding=config.skip_binding)
    except StatuesError as e:
        print(render_trace(trace_frame(query.root, getattr(e, 'trace', []), compiled.labels)))
        info(f"❌ query `{query.source}`: {e}")
        return EXIT_EVALUATION

    print(render_trace(trace_frame(query.root, events, compiled.labels)))
    print()
    print(f"result: {render_pmf(pmf, 'fraction' if config.fmt == 'json' else config.fmt, config.digits, full=True)}")
    return EXIT_OK


COMMANDS = {'run': cmd_run, 'check': cmd_check, 'trace': cmd_trace}


# =============================================
# ARGUMENT PARSING
# =============================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='statues',
        description='Exact inference on discrete probabilistic models (.prob files).',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument('path', help="model file, or '-' for stdin")
        p.add_argument('--query', action='append',
                       help='query expression replacing the file queries (repeatable)')
        p.add_argument('--format', choices=OUTPUT_FORMATS, default=DEFAULT_FORMAT,
                       help='result format (default: %(default)s)')
        p.add_argument('--digits', type=int, default=FLOAT_DIGITS,
                       help='digits after the point in float format (default: %(default)s)')
        p.add_argument('--skip-binding', action='store_true', default=SKIP_BINDING_DEFAULT,
                       help='do not bind nodes referenced only once')
        p.add_argument('--verbose', action='store_true', help='progress details on stderr')

    run = sub.add_parser('run', help='evaluate queries')
    common(run)
    run.add_argument('--oracle', action='store_true',
                     help='cross-check every result against possible-worlds enumeration')
    run.add_argument('--full', action='store_true',
                     help='print whole boolean pmfs instead of P(true)')
    run.add_argument('--export', action='store_true',
                     help='write CSV and JSON reports to data/results/')

    check = sub.add_parser('check', help='parse and compile only')
    common(check)

    trace = sub.add_parser('trace', help='print the enumeration step table of one query')
    common(trace)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 1:
        parser.error(f"--digits must be >= 1, got {args.digits}")

    try:
        validate_config()
    except ValueError as e:
        info(f"❌ Configuration error: {e}")
        return EXIT_DSL

    config = CliConfig.from_args(args)
    try:
        return COMMANDS[config.command](config)
    except DslError as e:
        report_dsl_error(e)
        return EXIT_DSL
    except OSError as e:
        info(f"❌ Cannot read model: {e}")
        return EXIT_DSL


if __name__ == "__main__":
    sys.exit(main())
