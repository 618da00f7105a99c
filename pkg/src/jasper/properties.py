"""The global properties array.

Every value a server process knows about lives in one flat string map.
Keys carry a namespace prefix so configuration, form, temporary, error
and serialized-form entries can share the map without colliding::

    CONFIG.rootDir   FORM.page   VAR.vExclaim   ERROR.comments   SERIAL.feedback

Absent keys read as ``None``; a key bound to ``""`` is present.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping, MutableMapping

from jasper.errors import NamespaceError

PREFIXES = ("CONFIG.", "FORM.", "VAR.", "ERROR.", "SERIAL.")


def is_namespaced(key: object) -> bool:
    if not isinstance(key, str):
        return False
    for prefix in PREFIXES:
        if key.startswith(prefix):
            return len(key) > len(prefix)
    return False


def check_key(key: object) -> str:
    if not is_namespaced(key):
        raise NamespaceError(
            f"property key {key!r} must be one of {', '.join(PREFIXES)} followed by a name"
        )
    return key  # type: ignore[return-value]


class PropertyMap(MutableMapping):
    """Per-request map of namespaced string keys to string values.

    Not thread-safe; a map belongs to exactly one request.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, str] | None = None, **kwargs: str):
        self._entries: dict[str, str] = {}
        if entries:
            self.update(entries)
        if kwargs:
            self.update(kwargs)

    def __getitem__(self, key: str) -> str:
        return self._entries[key]

    def __setitem__(self, key: str, value: str) -> None:
        check_key(key)
        if not isinstance(value, str):
            raise TypeError(f"property values are strings, got {type(value).__name__} for {key}")
        self._entries[key] = value

    def __delitem__(self, key: str) -> None:
        del self._entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"PropertyMap({self._entries!r})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PropertyMap):
            return self._entries == other._entries
        if isinstance(other, Mapping):
            return self._entries == dict(other)
        return NotImplemented

    def get(self, key: str, default: str | None = None) -> str | None:
        return self._entries.get(key, default)

    def set(self, key: str, value: str) -> None:
        self[key] = value

    def unset(self, key: str) -> None:
        """Remove *key*; a no-op when it is not bound."""
        self._entries.pop(key, None)

    def copy(self) -> PropertyMap:
        dup = PropertyMap()
        dup._entries = dict(self._entries)
        return dup

    def namespace(self, prefix: str) -> dict[str, str]:
        """Entries under ``prefix.`` with the prefix stripped."""
        head = prefix.rstrip(".") + "."
        return {k[len(head):]: v for k, v in self._entries.items() if k.startswith(head)}
