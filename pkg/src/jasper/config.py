"""``name=value`` configuration files.

Lines whose first non-space character is ``#`` are comments, blank lines
are skipped, and every other line must contain an ``=``.  The name is
trimmed; the value is everything after the first ``=``, verbatim.
"""

from __future__ import annotations

import os
from collections.abc import Iterator

from jasper.errors import ConfigError, NamespaceError
from jasper.properties import PREFIXES, PropertyMap


def read_lines(path: str | os.PathLike) -> list[str]:
    """Read a UTF-8 text file as lines, accepting LF or CRLF terminators."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return text.replace("\r\n", "\n").split("\n")


def iter_assignments(path: str | os.PathLike) -> Iterator[tuple[int, str, str]]:
    for lineno, line in enumerate(read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ConfigError(os.fspath(path), lineno, line)
        yield lineno, name, value


def parse_bare(path: str | os.PathLike, prefix: str, props: PropertyMap) -> None:
    """Bind every assignment in *path* as ``prefix.name`` in *props*.

    Later lines overwrite earlier ones with the same name.
    """
    head = prefix + "."
    if head not in PREFIXES:
        raise NamespaceError(f"unknown property namespace {prefix!r}")
    for _, name, value in iter_assignments(path):
        props[head + name] = value


def parse(path: str | os.PathLike, props: PropertyMap) -> None:
    parse_bare(path, "CONFIG", props)
