"""
Corpus check script - runs every model in data/models/ with the oracle cross-check.
Useful after changing the engine, the parser or a model file.
"""

import sys
from pathlib import Path

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.compiler import load_model, run_queries
from src.config import MODEL_EXTENSION, MODELS_DIR
from src.errors import DslError

# Models whose queries are expected to fail evaluation
EXPECTED_FAILURES = {'bad'}


def check_model(path: Path) -> dict:
    """
    Parse, compile and run one model with the oracle cross-check.

    Args:
        path: Model file

    Returns:
        Dict with query, error, mismatch and skipped counts
    """
    summary = {'queries': 0, 'errors': 0, 'mismatches': 0, 'skipped': 0, 'dsl_error': None}
    try:
        compiled = load_model(path.read_text(encoding='utf-8'), path.name)
    except DslError as e:
        summary['dsl_error'] = str(e)
        return summary

    for result in run_queries(compiled, oracle=True):
        summary['queries'] += 1
        if result.error is not None:
            summary['errors'] += 1
        if result.mismatch:
            summary['mismatches'] += 1
            print(f"  ❌ mismatch: {result.source}")
        if result.oracle_skipped:
            summary['skipped'] += 1
            print(f"  ⚠️  oracle skipped: {result.source}")
    return summary


def check_corpus(models_dir: Path = MODELS_DIR) -> bool:
    """
    Check every model file in a directory.

    Returns:
        True if every model parsed and no oracle mismatch occurred
    """
    print("=" * 70)
    print("  CHECKING MODEL CORPUS")
    print("=" * 70)

    files = sorted(models_dir.glob(f'*{MODEL_EXTENSION}'))
    if not files:
        print(f"\n⚠️  No {MODEL_EXTENSION} files found in {models_dir}")
        return False

    ok = True
    for path in files:
        print(f"\n{path.name}")
        summary = check_model(path)
        if summary['dsl_error']:
            print(f"  ❌ {summary['dsl_error']}")
            ok = False
            continue

        expected = path.stem in EXPECTED_FAILURES
        if summary['mismatches'] or (summary['errors'] and not expected):
            ok = False
        print(f"  ✓ {summary['queries']} queries, {summary['errors']} error(s)"
              f"{' (expected)' if expected and summary['errors'] else ''}, "
              f"{summary['mismatches']} mismatch(es)")

    print("\n" + "=" * 70)
    print("  ✓ CORPUS OK" if ok else "  ❌ CORPUS CHECK FAILED")
    print("=" * 70)
    return ok


if __name__ == "__main__":
    if '--help' in sys.argv or '-h' in sys.argv:
        print(__doc__)
        print("\nUsage: python scripts/check_corpus.py [models_dir]")
        sys.exit(0)

    args = [a for a in sys.argv[1:] if not a.startswith('-')]
    directory = Path(args[0]) if args else MODELS_DIR
    sys.exit(0 if check_corpus(directory) else 1)
