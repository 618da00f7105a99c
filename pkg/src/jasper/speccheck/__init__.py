"""Executable checks for the template engine and the feedback application.

``oracle`` re-implements file and line processing with a deliberately
different algorithm; ``harness`` evaluates pre/postcondition triples
over the property map against the real operations.
"""

from jasper.speccheck.harness import (
    Assertion,
    DispatchResult,
    HarnessError,
    HoareTriple,
    TripleResult,
    check_dispatch,
    check_triple,
    load_suite,
    load_triple,
    parse_triple,
    run_suite,
)
from jasper.speccheck.oracle import FileModel, oracle_process_file, oracle_process_line

__all__ = [
    "Assertion",
    "DispatchResult",
    "FileModel",
    "HarnessError",
    "HoareTriple",
    "TripleResult",
    "check_dispatch",
    "check_triple",
    "load_suite",
    "load_triple",
    "oracle_process_file",
    "oracle_process_line",
    "parse_triple",
    "run_suite",
]
