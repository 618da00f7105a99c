"""Request parsing, form preprocessing and the form-oriented token handlers."""

from __future__ import annotations

import enum
import logging
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Optional

from jasper.errors import RequestError
from jasper.properties import PropertyMap, check_key
from jasper.template import (
    Handler,
    ResolverChain,
    Token,
    default_resolve,
    process_file_plain,
)
from jasper.urlencoding import decode_pairs

log = logging.getLogger(__name__)

FORM_URLENCODED = "application/x-www-form-urlencoded"


class FormOutcome(enum.Enum):
    PASSIVE = "passive"
    INVALID = "invalid"
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class RequestData:
    method: str = "GET"
    query: str = ""
    body: str = ""
    content_type: str = ""

    def __post_init__(self):
        if self.method not in ("GET", "POST"):
            raise RequestError(f"unsupported method {self.method}")
        if self.body and self.method != "POST":
            raise RequestError("only POST requests carry a body")


def parse_request(req: RequestData, props: PropertyMap) -> None:
    """Bind every submitted variable as ``FORM.name``; the last duplicate wins."""
    if req.method == "POST":
        mime = req.content_type.split(";", 1)[0].strip().lower()
        if mime != FORM_URLENCODED and (mime or req.body):
            raise RequestError(f"unsupported content type {req.content_type!r}")
        data = req.body
    else:
        data = req.query
    for name, value in decode_pairs(data):
        if name:
            props["FORM." + name] = value


# Validation rules take the submitted value (None when absent).
Rule = Callable[[Optional[str]], bool]


def nonempty(value: Optional[str]) -> bool:
    return bool(value and value.strip())


# Effects run on successful validation and report whether they worked.
FormEffect = Callable[[PropertyMap], bool]


@dataclass(frozen=True)
class FormDefinition:
    """One form, bound to one page by ``page`` and to its submissions by ``command``.

    ``base_handlers`` go ahead of the form handlers when the form's
    template is rendered, so the template can use application tokens
    such as ``[[MAIN]]``.
    """

    page: str
    command: str
    fields: Sequence[tuple[str, Rule]]
    template_path: str
    serial_key: str
    base_handlers: tuple[Handler, ...] = field(default=())

    def __post_init__(self):
        check_key(self.serial_key)
        if not self.serial_key.startswith("SERIAL."):
            raise ValueError(f"serialized forms live under SERIAL., got {self.serial_key}")

    @property
    def form_chain(self) -> ResolverChain:
        return ResolverChain(self.base_handlers + (form_controls_handler, default_resolve))

    @property
    def errors_chain(self) -> ResolverChain:
        return ResolverChain(
            self.base_handlers + (form_errors_handler, form_controls_handler, default_resolve)
        )


def validate(defn: FormDefinition, props: PropertyMap) -> Optional[tuple[str, str]]:
    """Return ``(field, error_key)`` for the first invalid field, or None."""
    for name, rule in defn.fields:
        if not rule(props.get("FORM." + name)):
            return name, "ERROR." + name
    return None


def _render(defn: FormDefinition, chain: ResolverChain, props: PropertyMap) -> None:
    root = props.get("CONFIG.rootDir", "")
    path = os.path.join(root, defn.template_path)
    props[defn.serial_key] = process_file_plain(path, chain, props)


def preprocess_form(defn: FormDefinition, effect: FormEffect, props: PropertyMap) -> FormOutcome:
    """Handle one form before the page that shows it is rendered.

    Without a matching ``FORM.command`` the form is being shown for the
    first time and is rendered as-is.  A submission is validated; an
    invalid one is re-rendered with the first bad field flagged, a valid
    one triggers *effect*.  Rendered forms are stored at
    ``defn.serial_key``.  ``FORM.page`` is never modified here.
    """
    if props.get("FORM.command") != defn.command:
        _render(defn, defn.form_chain, props)
        return FormOutcome.PASSIVE

    problem = validate(defn, props)
    if problem is not None:
        name, error_key = problem
        message = props.get(error_key)
        if message is None:
            log.warning("no error message configured for %s", error_key)
            message = ""
        props["VAR.vExclaim"] = name
        props["VAR.vError"] = message
        try:
            _render(defn, defn.errors_chain, props)
        finally:
            props.unset("VAR.vExclaim")
            props.unset("VAR.vError")
        return FormOutcome.INVALID

    return FormOutcome.SUCCESS if effect(props) else FormOutcome.FAILURE


def form_errors_handler(token: Token, props: PropertyMap) -> Optional[str]:
    """``[[EXCLAIM:field]]`` flags the invalid field with ``!``; ``[[ERROR]]`` prints its message."""
    if token.name == "EXCLAIM":
        flagged = props.get("VAR.vExclaim")
        return "!" if flagged is not None and token.arg == flagged else ""
    if token.name == "ERROR":
        return props.get("VAR.vError", "")
    return None


_CONTROL_ATTRS = {
    "CHECKED": ' checked="checked"',
    "SELECTED": ' selected="selected"',
}


def form_controls_handler(token: Token, props: PropertyMap) -> Optional[str]:
    """Mark radio buttons, check boxes and options that match the submitted value.

    ``[[CHECKED:name:value]]`` and ``[[SELECTED:name:value]]`` expand to the
    matching HTML attribute when ``FORM.name`` equals ``value``.
    """
    attr = _CONTROL_ATTRS.get(token.name)
    if attr is None:
        return None
    name, sep, value = (token.arg or "").partition(":")
    if not sep or not name:
        return ""
    return attr if props.get("FORM." + name) == value else ""
