"""Exception hierarchy shared by the library and the command line.

Each class carries the process exit status the CLI reports for it.
"""


class NetdepError(Exception):
    exit_code = 1


class DataError(NetdepError):
    """Input data is malformed, inconsistent or non-finite."""

    exit_code = 2


class ParseError(DataError):
    """A text input could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(NetdepError):
    exit_code = 3


class ParameterError(NetdepError, ValueError):
    """An argument is outside its documented domain."""

    exit_code = 4
