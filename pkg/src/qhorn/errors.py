"""Exception hierarchy shared by every qhorn module."""


class QhornError(Exception):
    """Base class for all engine errors."""


class DeclarationError(QhornError):
    """A variable is used but not declared in the prefix."""


class NotHornError(QhornError):
    """A clause has more than one positive literal."""


class ParseError(QhornError):
    """Malformed source text, positioned at (line, column), both 1-based."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class CapExceeded(QhornError):
    """The brute-force oracle was asked to evaluate too many variables."""


class PrefixMismatch(QhornError):
    pass


class RangeError(QhornError):
    pass


class NewVariableError(QhornError):
    """A query mentions a variable absent from the program."""


class PivotMismatch(QhornError):
    pass


class UniversalPivot(QhornError):
    pass


class LiteralNotInClause(QhornError):
    pass


class ComplementMissing(QhornError):
    pass


class ArityMismatch(QhornError):
    pass
