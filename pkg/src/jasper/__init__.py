"""Jasper: a line-oriented ``[[token]]`` template engine and form-handling server."""

from jasper.errors import (
    ConfigError,
    JasperError,
    ListFormatError,
    NamespaceError,
    RequestError,
    TokenUsageError,
)
from jasper.properties import PREFIXES, PropertyMap

__all__ = [
    "PREFIXES",
    "ConfigError",
    "JasperError",
    "ListFormatError",
    "NamespaceError",
    "PropertyMap",
    "RequestError",
    "TokenUsageError",
]

__version__ = "0.1.0"
