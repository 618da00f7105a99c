"""application/x-www-form-urlencoded encoding as used by list files and form parsing."""

from __future__ import annotations

from urllib.parse import unquote_plus

# Kept literal so that "Hello, world!!" encodes as "Hello,+world!!".
SAFE = frozenset(
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.!,*()"
)


def form_encode(text: str) -> str:
    out = []
    for byte in text.encode("utf-8", "surrogatepass"):
        if byte in SAFE:
            out.append(chr(byte))
        elif byte == 0x20:
            out.append("+")
        else:
            out.append(f"%{byte:02X}")
    return "".join(out)


def form_decode(text: str) -> str:
    """Inverse of :func:`form_encode`. Malformed ``%`` escapes are kept literally."""
    return unquote_plus(text, encoding="utf-8", errors="replace")


def encode_pairs(pairs) -> str:
    return "&".join(f"{form_encode(k)}={form_encode(v)}" for k, v in pairs)


def decode_pairs(query: str) -> list[tuple[str, str]]:
    """Split a query string into decoded ``(name, value)`` pairs, in order.

    Empty fields are dropped; a field without ``=`` has an empty value.
    """
    pairs = []
    for field in query.split("&"):
        if not field:
            continue
        name, _, value = field.partition("=")
        pairs.append((form_decode(name), form_decode(value)))
    return pairs
