"""Line-oriented ``[[token]]`` substitution.

A template line is a run of literal strings separated by tokens::

    s1 [[t1]] s2 [[t2]] ... sN

Processing replaces every token with the string its resolver chain
produces and leaves the literal strings untouched.  Tokens never span
lines and never nest: ``[[a]]b]]`` is the token ``a`` followed by the
literal ``b]]``, and an unclosed ``[[`` is literal text.
"""

from __future__ import annotations

import logging
import os
import re
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Optional, Union

from jasper.config import read_lines
from jasper.errors import JasperError, ListFormatError
from jasper.properties import PropertyMap
from jasper.urlencoding import form_encode

log = logging.getLogger(__name__)

# A token body is nonempty, does not start with ':' and contains neither '[[' nor ']]'.
_NOT_DELIM = r"(?!\[\[|\]\])"
TOKEN_RE = re.compile(rf"\[\[({_NOT_DELIM}[^:](?:{_NOT_DELIM}.)*?)\]\]", re.DOTALL)


@dataclass(frozen=True)
class Token:
    raw: str
    name: str
    arg: Optional[str] = None

    @classmethod
    def parse(cls, raw: str) -> Token:
        name, sep, arg = raw.partition(":")
        return cls(raw, name, arg if sep else None)

    def __str__(self) -> str:
        return f"[[{self.raw}]]"


@dataclass(frozen=True)
class ParsedLine:
    """``strings`` has exactly one more element than ``tokens``."""

    strings: tuple[str, ...]
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if len(self.strings) != len(self.tokens) + 1:
            raise ValueError("a parsed line alternates strings and tokens, starting and ending with a string")

    def segments(self) -> Iterator[Union[str, Token]]:
        for s, t in zip(self.strings, self.tokens):
            yield s
            yield t
        yield self.strings[-1]

    def reassemble(self) -> str:
        return "".join(str(seg) for seg in self.segments())


def tokenize_line(line: str) -> ParsedLine:
    strings = []
    tokens = []
    pos = 0
    for m in TOKEN_RE.finditer(line):
        strings.append(line[pos:m.start()])
        tokens.append(Token.parse(m.group(1)))
        pos = m.end()
    strings.append(line[pos:])
    return ParsedLine(tuple(strings), tuple(tokens))


Handler = Callable[[Token, PropertyMap], Optional[str]]
"""A token handler returns the replacement text, or ``None`` to decline."""


class ResolverChain:
    """Token handlers tried in order, most specific first.

    The first handler that does not return ``None`` wins.  The last
    handler is expected to be total (``default_resolve`` usually is).
    """

    def __init__(self, handlers: Iterable[Handler]):
        self.handlers: tuple[Handler, ...] = tuple(handlers)
        if not self.handlers:
            raise ValueError("a resolver chain needs at least one handler")

    def __iter__(self):
        return iter(self.handlers)

    def __len__(self):
        return len(self.handlers)

    def __repr__(self):
        names = ", ".join(getattr(h, "__name__", repr(h)) for h in self.handlers)
        return f"ResolverChain([{names}])"

    def prepend(self, *handlers: Handler) -> ResolverChain:
        return ResolverChain(handlers + self.handlers)

    def resolve(self, token: Token, props: PropertyMap) -> str:
        for handler in self.handlers:
            result = handler(token, props)
            if result is not None:
                return result
        raise JasperError(f"no handler in {self!r} resolved {token}")


def resolve(chain: ResolverChain, token: Token, props: PropertyMap) -> str:
    return chain.resolve(token, props)


def default_resolve(token: Token, props: PropertyMap) -> str:
    """Echo a temporary, form or configuration variable, in that order of precedence."""
    for prefix in ("VAR.", "FORM.", "CONFIG."):
        value = props.get(prefix + token.raw)
        if value is not None:
            return value
    log.debug("unresolved token %s", token)
    return ""


DEFAULT_CHAIN = ResolverChain([default_resolve])


def process_line(line: str, chain: ResolverChain, props: PropertyMap) -> str:
    parsed = tokenize_line(line)
    out = []
    for s, t in zip(parsed.strings, parsed.tokens):
        out.append(s)
        out.append(chain.resolve(t, props))
    out.append(parsed.strings[-1])
    return "".join(out)


def process_lines(lines: Sequence[str], chain: ResolverChain, props: PropertyMap) -> str:
    return "\n".join(process_line(line, chain, props) for line in lines)


def process_file_plain(path: str | os.PathLike, chain: ResolverChain, props: PropertyMap) -> str:
    """Process a template file line by line; lines are rejoined with LF."""
    return process_lines(read_lines(path), chain, props)


def _split_assignment(line: str) -> Optional[tuple[str, str]]:
    # Split at the first '=' that lies outside every token, so that
    # substituted names may themselves contain '='.
    parsed = tokenize_line(line)
    offset = 0
    for s, t in zip(parsed.strings, parsed.tokens):
        i = s.find("=")
        if i >= 0:
            return line[:offset + i], line[offset + i + 1:]
        offset += len(s) + len(str(t))
    i = parsed.strings[-1].find("=")
    if i >= 0:
        return line[:offset + i], line[offset + i + 1:]
    return None


def process_file_list(path: str | os.PathLike, chain: ResolverChain, props: PropertyMap) -> str:
    """Process a list file into a form-encoded query string.

    Each nonblank ``name=value`` line has its tokens substituted and both
    sides encoded; the resulting pairs are joined with ``&``.
    """
    pairs = []
    for lineno, line in enumerate(read_lines(path), start=1):
        if not line.strip():
            continue
        split = _split_assignment(line)
        if split is None:
            raise ListFormatError(os.fspath(path), lineno, line)
        name, value = (process_line(part, chain, props) for part in split)
        pairs.append(f"{form_encode(name)}={form_encode(value)}")
    return "&".join(pairs)
