class JasperError(Exception):
    pass


class NamespaceError(JasperError, KeyError):
    """A property key without a recognized ``PREFIX.`` namespace."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(JasperError):
    def __init__(self, path, lineno, line):
        super().__init__(f"{path}:{lineno}: not a comment or name=value assignment: {line!r}")
        self.path = path
        self.lineno = lineno
        self.line = line


class ListFormatError(JasperError):
    def __init__(self, path, lineno, line):
        super().__init__(f"{path}:{lineno}: list line has no '=': {line!r}")
        self.path = path
        self.lineno = lineno
        self.line = line


class TokenUsageError(JasperError):
    pass


class RequestError(JasperError):
    pass
