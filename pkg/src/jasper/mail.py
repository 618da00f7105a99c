"""Pluggable email transports.

The default :class:`SpoolTransport` appends messages to a text file, one
record per message::

    to: webmaster@localhost
    from-name: Site feedback
    subject: Site feedback
    body:
     Name: James Smith
     <every body line indented by one space>
    %%

Header values are kept on one line.  Body lines are prefixed with a single
space so that no body line can be mistaken for the ``%%`` separator.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Protocol

SEPARATOR = "%%"
HEADERS = ("to", "from-name", "subject")


@dataclass(frozen=True)
class EmailMessage:
    to: str
    from_name: str
    subject: str
    body: str


class Transport(Protocol):
    def send(self, message: EmailMessage) -> bool: ...


def _one_line(value: str) -> str:
    return " ".join(value.splitlines())


def format_record(message: EmailMessage) -> str:
    lines = [
        f"to: {_one_line(message.to)}",
        f"from-name: {_one_line(message.from_name)}",
        f"subject: {_one_line(message.subject)}",
        "body:",
    ]
    lines += [" " + line for line in message.body.replace("\r\n", "\n").split("\n")]
    lines.append(SEPARATOR)
    return "\n".join(lines) + "\n"


def read_spool(path: str | os.PathLike) -> list[EmailMessage]:
    """Parse a spool file back into messages; a missing file holds none."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except FileNotFoundError:
        return []
    messages = []
    record: list[str] = []
    for line in text.split("\n"):
        if line == SEPARATOR:
            messages.append(_parse_record(record))
            record = []
        elif line or record:
            record.append(line)
    return messages


def _parse_record(lines: list[str]) -> EmailMessage:
    headers = {}
    for i, line in enumerate(lines):
        if line == "body:":
            body = "\n".join(l[1:] for l in lines[i + 1:])
            break
        name, _, value = line.partition(": ")
        headers[name] = value
    else:
        raise ValueError("spool record without a body")
    return EmailMessage(headers.get("to", ""), headers.get("from-name", ""), headers.get("subject", ""), body)


class SpoolTransport:
    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._lock = threading.Lock()

    def send(self, message: EmailMessage) -> bool:
        record = format_record(message)
        try:
            with self._lock, open(self.path, "a", encoding="utf-8", newline="") as fh:
                fh.write(record)
        except OSError:
            return False
        return True

    def messages(self) -> list[EmailMessage]:
        with self._lock:
            return read_spool(self.path)


class MemoryTransport:
    def __init__(self):
        self.sent: list[EmailMessage] = []
        self._lock = threading.Lock()

    def send(self, message: EmailMessage) -> bool:
        with self._lock:
            self.sent.append(message)
        return True


class FailingTransport:
    """Rejects every message; counts the attempts."""

    def __init__(self):
        self.attempts = 0

    def send(self, message: EmailMessage) -> bool:
        self.attempts += 1
        return False
