"""Exception hierarchy shared by every module of the package."""


class BanError(Exception):
    """Base class for analysis failures (CLI exit status 1)."""


class StructuralError(BanError, ValueError):
    """A value was built from malformed data (bad table length, bad arity...)."""


class OutOfRangeError(BanError, IndexError):
    """An automaton index is outside ``0..n-1``."""


class DomainError(BanError, ValueError):
    """Arguments are outside the domain an operation is defined on."""


class CapacityError(BanError):
    """The requested size exceeds a documented enumeration cap."""

    def __init__(self, what, n, cap):
        self.n = n
        self.cap = cap
        super().__init__(f"{what}: n={n} exceeds cap n <= {cap}")


class ParseError(BanError, ValueError):
    """Syntax or semantic error in network or schedule text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)
