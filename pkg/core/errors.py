"""
Exception hierarchy shared by the numerical core and the command line
"""


class LabError(Exception):
    """Base class for every error raised by the lab"""


class DomainError(LabError, ValueError):
    """Input rejected by an operation's precondition"""


class ConfigError(LabError):
    """Invalid run configuration (exit status 2)"""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class NumericalValidityError(LabError):
    """A computation finished but failed its validity checks (exit status 3)"""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)
