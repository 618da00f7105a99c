"""Reference implementation of template processing.

Shares no scanning code with :mod:`jasper.template`: lines are walked one
character at a time instead of matched with a regular expression, and
handlers are dispatched here rather than through ``ResolverChain.resolve``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from jasper.properties import PropertyMap
from jasper.template import Token

OPEN, CLOSE = "[[", "]]"


@dataclass
class FileModel:
    """A file of ``lines`` with a 1-based read pointer; pointer 0 means consumed and closed."""

    pointer: int
    lines: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.pointer <= max(len(self.lines), 1):
            raise ValueError(f"pointer {self.pointer} outside 0..{len(self.lines)}")

    @classmethod
    def from_path(cls, path: str | os.PathLike) -> FileModel:
        with open(path, "rb") as fh:
            data = fh.read()
        lines = data.replace(b"\r\n", b"\n").decode("utf-8").split("\n")
        return cls(1, lines)

    def read_line(self) -> str | None:
        if self.pointer == 0 or self.pointer > len(self.lines):
            return None
        line = self.lines[self.pointer - 1]
        self.pointer += 1
        return line

    def close(self) -> None:
        self.pointer = 0


def _token_end(line: str, start: int) -> int:
    """Index of the ``]]`` closing a token opened at *start*, or -1."""
    body = start + 2
    k = body
    while k < len(line):
        pair = line[k:k + 2]
        if pair == CLOSE:
            if k == body or line[body] == ":":
                return -1
            return k
        if pair == OPEN:
            return -1
        k += 1
    return -1


def split_line(line: str) -> list[tuple[bool, str]]:
    """Split *line* into ``(is_token, text)`` pieces; token text excludes the brackets."""
    pieces: list[tuple[bool, str]] = []
    literal: list[str] = []
    i = 0
    while i < len(line):
        if line[i:i + 2] == OPEN:
            end = _token_end(line, i)
            if end >= 0:
                pieces.append((False, "".join(literal)))
                literal = []
                pieces.append((True, line[i + 2:end]))
                i = end + 2
                continue
        literal.append(line[i])
        i += 1
    pieces.append((False, "".join(literal)))
    return pieces


def make_token(raw: str) -> Token:
    colon = raw.find(":")
    if colon < 0:
        return Token(raw, raw, None)
    return Token(raw, raw[:colon], raw[colon + 1:])


def dispatch(handlers, token: Token, props: PropertyMap) -> str:
    for handler in handlers:
        out = handler(token, props)
        if out is not None:
            return out
    raise LookupError(f"no handler matched {token}")


def oracle_process_line(line: str, handlers, props: PropertyMap) -> str:
    out = ""
    for is_token, text in split_line(line):
        out += dispatch(handlers, make_token(text), props) if is_token else text
    return out


def oracle_process_file(file: FileModel, handlers, props: PropertyMap) -> str:
    """Process every line of *file* from pointer 1, leaving the file closed (pointer 0)."""
    if file.pointer != 1:
        raise ValueError(f"file must be positioned at line 1, not {file.pointer}")
    processed = []
    while (line := file.read_line()) is not None:
        processed.append(oracle_process_line(line, handlers, props))
    file.close()
    return "\n".join(processed)
