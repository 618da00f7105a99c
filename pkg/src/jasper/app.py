"""The feedback demo application.

Three layers of token handling sit on top of the default echo resolver:
``main_handler`` (``[[FEEDBACK_FORM]]``), ``base_handler`` (``[[MAIN]]``
and ``[[PAGE:name]]``) and the form handlers.  ``preprocess`` runs the
feedback form for the ``feedback`` page and moves ``FORM.page`` on to
``feedback_success`` or ``feedback_failure`` when the form is handled.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from jasper.errors import JasperError, TokenUsageError
from jasper.forms import (
    FormDefinition,
    FormOutcome,
    form_controls_handler,
    form_errors_handler,
    nonempty,
    preprocess_form,
)
from jasper.mail import EmailMessage, Transport
from jasper.properties import PropertyMap
from jasper.template import (
    DEFAULT_CHAIN,
    ResolverChain,
    Token,
    default_resolve,
    process_file_list,
    process_file_plain,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AppContext:
    root_dir: str
    app_path: str = "/"
    proc_path: str = ""
    proc_ext: str = ""

    @classmethod
    def from_props(cls, props: PropertyMap) -> AppContext:
        root = props.get("CONFIG.rootDir")
        if root is None:
            raise JasperError("CONFIG.rootDir is not configured")
        return cls(
            root,
            props.get("CONFIG.appPath", "/"),
            props.get("CONFIG.procPath", ""),
            props.get("CONFIG.procExt", ""),
        )

    def include(self, name: str) -> str:
        return os.path.join(self.root_dir, "template", "_inc", name)


def demo_root() -> Path:
    """Root directory of the bundled demo site (``config/`` and ``template/``)."""
    return Path(str(resources.files("jasper") / "demo"))


def base_handler(token: Token, props: PropertyMap) -> Optional[str]:
    if token.name == "MAIN":
        ctx = AppContext.from_props(props)
        return process_file_plain(ctx.include("main.html"), DEFAULT_CHAIN, props).strip()
    if token.name == "PAGE":
        if not token.arg:
            raise TokenUsageError(f"{token} needs a page name, as in [[PAGE:name]]")
        ctx = AppContext.from_props(props)
        props["VAR.vPage"] = token.arg
        try:
            return process_file_list(ctx.include("page.list"), DEFAULT_CHAIN, props)
        finally:
            props.unset("VAR.vPage")
    return None


FEEDBACK_FORM = FormDefinition(
    page="feedback",
    command="FEEDBACK",
    fields=(("fullname", nonempty), ("comments", nonempty)),
    template_path=os.path.join("template", "_inc", "feedback_form.html"),
    serial_key="SERIAL.feedback",
    base_handlers=(base_handler,),
)


def main_handler(token: Token, props: PropertyMap) -> Optional[str]:
    if token.raw == "FEEDBACK_FORM":
        form = props.get(FEEDBACK_FORM.serial_key)
        if form is None:
            log.warning("%s requested but the feedback form was not preprocessed", token)
            return ""
        return form
    return None


FULL_CHAIN = ResolverChain(
    [main_handler, base_handler, form_errors_handler, form_controls_handler, default_resolve]
)


def send_feedback_email(props: PropertyMap, transport: Transport) -> bool:
    missing = [k for k in ("CONFIG.smtpHost", "CONFIG.gFeedbackSenderName", "CONFIG.gFeedbackSubject")
               if props.get(k) is None]
    if missing:
        log.error("cannot send feedback, unset configuration: %s", ", ".join(missing))
        return False
    to = props.get("CONFIG.gFeedbackRecipient") or "webmaster@" + props["CONFIG.smtpHost"]
    body = (
        f"Name: {props.get('FORM.fullname', '')}\n"
        f"\n"
        f"Comments:\n"
        f"{props.get('FORM.comments', '')}"
    )
    message = EmailMessage(to, props["CONFIG.gFeedbackSenderName"], props["CONFIG.gFeedbackSubject"], body)
    try:
        return bool(transport.send(message))
    except Exception:
        log.exception("feedback transport failed")
        return False


_TRANSITIONS = {
    FormOutcome.SUCCESS: "feedback_success",
    FormOutcome.FAILURE: "feedback_failure",
}


def preprocess(props: PropertyMap, transport: Transport) -> None:
    """Run the form tied to the current page, possibly switching page.

    Only the ``feedback`` page has a form.  Because a handled submission
    moves ``FORM.page`` away from ``feedback``, replaying the same form
    data against the new page does not handle the form again.
    """
    if props.get("FORM.page") == FEEDBACK_FORM.page:
        outcome = preprocess_form(FEEDBACK_FORM, lambda p: send_feedback_email(p, transport), props)
        if outcome in _TRANSITIONS:
            props["FORM.page"] = _TRANSITIONS[outcome]
