"""Exception hierarchy shared by every polyskel module."""


class PolyskelError(Exception):
    pass


class DomainError(PolyskelError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ParseError(PolyskelError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndeterminateError(PolyskelError):
    """A search was abandoned before it could reach a verdict."""


class NumericError(PolyskelError, ArithmeticError):
    pass


class MemoryBudgetError(PolyskelError, MemoryError):
    pass
