"""Exception types raised by closedlight."""


class ClosedLightError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ClosedLightError, ValueError):
    pass


class UnsupportedParameterError(ClosedLightError, ValueError):
    pass


class UndefinedMetricError(ClosedLightError, ValueError):
    pass


class FormatError(ClosedLightError, ValueError):
    """Malformed or inconsistent file contents."""


class ParseError(FormatError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
