"""Pre/postcondition triples over the property map.

A triple file looks like this::

    name: exclaim-comments
    behaviour: 3

    [pre]
    VAR.vExclaim=comments

    [op]
    form_errors_handler EXCLAIM:comments

    [post]
    VAR.vExclaim=comments

    [return]
    !

Assertion lines are ``KEY=value`` (bound to exactly that value), ``?KEY``
(bound to anything) or ``!KEY`` (absent).  In a precondition ``?KEY`` is
bound to a fixed witness value.  The value ``$ROOT`` stands for the site
root the harness runs against.  ``[return]`` holds the exact expected
return value (``<not-matched>`` for a declining handler); ``[check]`` holds
structural checks on it, one per line:

    contains TEXT          absent TEXT           token-free
    field NAME flagged     field NAME unflagged  field NAME = VALUE
    hidden NAME = VALUE    error = TEXT          effects = N

Keys that appear in ``[pre]`` but not in ``[post]`` must keep their
precondition value (the frame rule).
"""

from __future__ import annotations

import os
from collections.abc import Callable
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Optional, Union

from jasper import app, forms, template
from jasper.mail import FailingTransport, MemoryTransport
from jasper.properties import PropertyMap, check_key
from jasper.server import ServerConfig, main_process
from jasper.urlencoding import encode_pairs

WITNESS = "witness"
NOT_MATCHED = "<not-matched>"


class HarnessError(Exception):
    pass


class _Bound:
    def __repr__(self):
        return "<bound>"


class _Absent:
    def __repr__(self):
        return "<absent>"


BOUND = _Bound()
ABSENT = _Absent()

Expected = Union[str, _Bound, _Absent]


@dataclass
class Assertion:
    entries: dict[str, Expected] = field(default_factory=dict)
    return_value: Optional[str] = None
    checks: list[str] = field(default_factory=list)

    def violations(self, props: PropertyMap) -> list[str]:
        found = []
        for key, want in self.entries.items():
            have = props.get(key)
            if want is ABSENT:
                if have is not None:
                    found.append(f"{key}: expected absent, found {have!r}")
            elif want is BOUND:
                if have is None:
                    found.append(f"{key}: expected bound, found absent")
            elif have != want:
                found.append(f"{key}: expected {want!r}, found {'absent' if have is None else repr(have)}")
        return found


@dataclass
class HoareTriple:
    name: str
    pre: Assertion
    operation: str
    argument: str
    post: Assertion
    behaviours: tuple[int, ...] = ()
    source: Optional[str] = None


@dataclass
class TripleResult:
    name: str
    passed: bool
    failures: list[str]
    returned: Optional[str] = None

    @property
    def first_failure(self) -> Optional[str]:
        return self.failures[0] if self.failures else None

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.name}"
        if self.failures:
            line += f": {self.failures[0]}"
        return line


# --- parsing ---------------------------------------------------------------

_SECTIONS = ("pre", "op", "post", "return", "check")


def _parse_entry(line: str, where: str) -> tuple[str, Expected]:
    if line.startswith("!"):
        key, want = line[1:].strip(), ABSENT
    elif line.startswith("?"):
        key, want = line[1:].strip(), BOUND
    else:
        key, sep, want = line.partition("=")
        if not sep:
            raise HarnessError(f"{where}: expected KEY=value, ?KEY or !KEY, got {line!r}")
        key = key.strip()
    try:
        check_key(key)
    except KeyError as exc:
        raise HarnessError(f"{where}: {exc}") from None
    return key, want


def parse_triple(text: str, source: str = "<string>") -> HoareTriple:
    meta: dict[str, str] = {}
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]") and stripped[1:-1] in _SECTIONS:
            current = stripped[1:-1]
            if current in sections:
                raise HarnessError(f"{source}:{lineno}: duplicate [{current}] section")
            sections[current] = []
            continue
        if current is None:
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition(":")
            if not sep:
                raise HarnessError(f"{source}:{lineno}: expected 'key: value' before the first section")
            meta[key.strip()] = value.strip()
        elif current == "return":
            sections[current].append(line)
        elif stripped and not stripped.startswith("#"):
            sections[current].append(stripped)

    if "op" not in sections or len(sections["op"]) != 1:
        raise HarnessError(f"{source}: exactly one operation line is required in [op]")
    op, _, arg = sections["op"][0].partition(" ")

    def assertion(section: str) -> Assertion:
        entries: dict[str, Expected] = {}
        for line in sections.get(section, []):
            key, want = _parse_entry(line, f"{source} [{section}]")
            if key in entries:
                raise HarnessError(f"{source} [{section}]: {key} asserted twice")
            entries[key] = want
        return Assertion(entries)

    post = assertion("post")
    if "return" in sections:
        lines = sections["return"]
        while lines and not lines[-1].strip():
            lines.pop()
        post.return_value = "\n".join(lines)
    post.checks = sections.get("check", [])
    behaviours = tuple(int(b) for b in meta.get("behaviour", "").replace(",", " ").split())
    name = meta.get("name") or Path(source).stem
    return HoareTriple(name, assertion("pre"), op, arg.strip(), post, behaviours, source)


def load_triple(path: str | os.PathLike) -> HoareTriple:
    with open(path, encoding="utf-8") as fh:
        return parse_triple(fh.read(), os.fspath(path))


def default_suite() -> Path:
    return Path(__file__).with_name("suite")


def load_suite(directory: str | os.PathLike | None = None) -> list[HoareTriple]:
    directory = Path(directory) if directory is not None else default_suite()
    paths = sorted(directory.glob("*.triple"))
    if not paths:
        raise HarnessError(f"no .triple files in {directory}")
    return [load_triple(p) for p in paths]


# --- operations --------------------------------------------------------------


@dataclass
class Env:
    root_dir: str
    transport: object = field(default_factory=MemoryTransport)

    @property
    def effects(self) -> int:
        if isinstance(self.transport, FailingTransport):
            return self.transport.attempts
        return len(self.transport.sent)


# An operation receives the precondition map, its argument and the
# environment, and returns the map to check the postcondition against
# together with the operation's return value (None when a handler declines).
Operation = Callable[[PropertyMap, str, Env], tuple[PropertyMap, Optional[str]]]

OPERATIONS: dict[str, Operation] = {}


def operation(name: str):
    def register(fn: Operation) -> Operation:
        OPERATIONS[name] = fn
        return fn
    return register


def _handler_op(handler):
    def run(props, arg, env):
        return props, handler(template.Token.parse(arg), props)
    return run


for _name, _handler in {
    "form_errors_handler": forms.form_errors_handler,
    "form_controls_handler": forms.form_controls_handler,
    "default_resolve": template.default_resolve,
    "base_handler": app.base_handler,
    "main_handler": app.main_handler,
}.items():
    OPERATIONS[_name] = _handler_op(_handler)


@operation("resolve")
def _resolve(props, arg, env):
    return props, app.FULL_CHAIN.resolve(template.Token.parse(arg), props)


@operation("process_line")
def _process_line(props, arg, env):
    return props, template.process_line(arg, app.FULL_CHAIN, props)


@operation("preprocess")
def _preprocess(props, arg, env):
    if arg.strip() == "transport=failing":
        env.transport = FailingTransport()
    app.preprocess(props, env.transport)
    return props, None


@operation("main")
def _main(props, arg, env):
    """Run the whole server process with the precondition's FORM entries as the request."""
    if arg.strip() == "transport=failing":
        env.transport = FailingTransport()
    elif arg.strip():
        raise HarnessError(f"main takes no argument other than transport=failing, got {arg!r}")
    others = [k for k in props if not k.startswith("FORM.")]
    if others:
        raise HarnessError(f"main() builds its own map; only FORM. entries may be preset, got {others}")
    fields = [(k[len("FORM."):], v) for k, v in props.items()]
    if fields:
        req = forms.RequestData("POST", "", encode_pairs(fields), forms.FORM_URLENCODED)
    else:
        req = forms.RequestData("GET")
    cfg = ServerConfig(root_dir=env.root_dir, transport=env.transport)
    return main_process(req, cfg)


# --- structural checks on rendered forms -------------------------------------


class _FormScanner(HTMLParser):
    """Collects exclaim spans, form controls and the error span in document order."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.items: list[tuple] = []
        self._capture: Optional[list] = None

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        if tag == "span" and attrs.get("class") in ("exclaim", "error"):
            self._capture = [attrs["class"], []]
        elif tag == "input" and attrs.get("name"):
            self.items.append(("control", attrs["name"], attrs.get("type", "text"), attrs.get("value", "")))
        elif tag == "textarea" and attrs.get("name"):
            self._capture = ["textarea", [], attrs["name"]]

    handle_startendtag = handle_starttag

    def handle_data(self, data):
        if self._capture is not None:
            self._capture[1].append(data)

    def handle_endtag(self, tag):
        if self._capture is None:
            return
        kind = self._capture[0]
        text = "".join(self._capture[1])
        if kind == "textarea" and tag == "textarea":
            self.items.append(("control", self._capture[2], "textarea", text))
            self._capture = None
        elif kind in ("exclaim", "error") and tag == "span":
            self.items.append((kind, text))
            self._capture = None


def scan_form(html: str) -> list[tuple]:
    scanner = _FormScanner()
    scanner.feed(html)
    scanner.close()
    return scanner.items


def _control(items, name):
    for i, item in enumerate(items):
        if item[0] == "control" and item[1] == name:
            return i, item
    return None, None


def _flag_for(items, name) -> Optional[str]:
    """Text of the exclaim span sitting directly before control *name*."""
    index, _ = _control(items, name)
    if index is None:
        return None
    for item in reversed(items[:index]):
        if item[0] == "control":
            return None
        if item[0] == "exclaim":
            return item[1]
    return None


def run_check(check: str, returned: Optional[str], env: Env) -> Optional[str]:
    """Evaluate one ``[check]`` line; return a failure message or None."""
    verb, _, rest = check.partition(" ")
    text = returned or ""
    if verb == "contains":
        return None if rest in text else f"check '{check}': text not found"
    if verb == "absent":
        return None if rest not in text else f"check '{check}': text present"
    if verb == "token-free":
        return None if "[[" not in text else "check 'token-free': output contains [["
    if verb == "effects":
        want = int(rest.partition("=")[2])
        return None if env.effects == want else f"check '{check}': {env.effects} effects performed"

    items = scan_form(text)
    if verb == "field":
        name, _, cond = rest.partition(" ")
        if _control(items, name)[1] is None:
            return f"check '{check}': no field named {name}"
        if cond == "flagged":
            flag = _flag_for(items, name)
            return None if flag == "!" else f"check '{check}': flag is {flag!r}"
        if cond == "unflagged":
            flag = _flag_for(items, name)
            return None if not flag else f"check '{check}': flag is {flag!r}"
        if cond.startswith("="):
            want = cond[1:].strip()
            have = _control(items, name)[1][3]
            return None if have == want else f"check '{check}': value is {have!r}"
    if verb == "hidden":
        name, _, want = rest.partition("=")
        _, item = _control(items, name.strip())
        if item is None or item[2] != "hidden":
            return f"check '{check}': no hidden field {name.strip()}"
        return None if item[3] == want.strip() else f"check '{check}': value is {item[3]!r}"
    if verb == "error":
        want = rest.partition("=")[2].strip()
        errors = [item[1] for item in items if item[0] == "error"]
        if not errors:
            return f"check '{check}': no error span"
        return None if errors[0].strip() == want else f"check '{check}': error is {errors[0]!r}"
    raise HarnessError(f"unknown check {check!r}")


# --- running -----------------------------------------------------------------


def _materialize(value: Expected, env: Env) -> str:
    if value is BOUND:
        return WITNESS
    return value.replace("$ROOT", os.path.join(env.root_dir, ""))


def check_triple(t: HoareTriple, root_dir: str | os.PathLike | None = None) -> TripleResult:
    """Establish the precondition, run the operation, evaluate the postcondition."""
    op = OPERATIONS.get(t.operation)
    if op is None:
        raise HarnessError(f"{t.name}: unknown operation {t.operation!r}")
    env = Env(os.fspath(root_dir) if root_dir is not None else str(app.demo_root()))

    props = PropertyMap()
    for key, want in t.pre.entries.items():
        if want is not ABSENT:
            props[key] = _materialize(want, env)
    before = props.copy()

    after, returned = op(props, t.argument, env)

    post = Assertion({k: (v if v in (BOUND, ABSENT) else _materialize(v, env))
                      for k, v in t.post.entries.items()})
    failures = post.violations(after)
    for key, value in before.items():
        if key not in t.post.entries and after.get(key) != value:
            failures.append(f"frame: {key} changed from {value!r} to {after.get(key)!r}")
    if t.post.return_value is not None:
        want = t.post.return_value
        have = NOT_MATCHED if returned is None else returned
        if have != want:
            failures.append(f"return: expected {want!r}, got {have!r}")
    for check in t.post.checks:
        failure = run_check(check, returned, env)
        if failure:
            failures.append(failure)
    return TripleResult(t.name, not failures, failures, returned)


def run_suite(directory: str | os.PathLike | None = None, root_dir=None) -> list[TripleResult]:
    return [check_triple(t, root_dir) for t in load_suite(directory)]


# --- dispatch ------------------------------------------------------------------


@dataclass
class DispatchResult:
    passed: bool
    matched_at: Optional[int]
    expected_at: Optional[int]
    consulted: list[int]
    result: Optional[str]


def check_dispatch(chain: template.ResolverChain, token: template.Token, props: PropertyMap) -> DispatchResult:
    """Check that *chain* answers *token* with its earliest matching handler.

    The expected handler is found by asking each handler on its own (on a
    copy of *props*); the chain is then run with every handler
    instrumented, and must consult handlers 0..k in order and no others.
    """
    expected_at = None
    expected_out = None
    for i, handler in enumerate(chain):
        out = handler(token, props.copy())
        if out is not None:
            expected_at, expected_out = i, out
            break

    consulted: list[int] = []

    def instrument(i, handler):
        def recorded(tok, p):
            consulted.append(i)
            return handler(tok, p)
        recorded.__name__ = getattr(handler, "__name__", f"handler{i}")
        return recorded

    traced = type(chain)(instrument(i, h) for i, h in enumerate(chain))
    result = traced.resolve(token, props)
    matched_at = consulted[-1] if consulted else None
    passed = (
        expected_at is not None
        and consulted == list(range(expected_at + 1))
        and result == expected_out
    )
    return DispatchResult(passed, matched_at, expected_at, consulted, result)
