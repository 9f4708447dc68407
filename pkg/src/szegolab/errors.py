"""Exception hierarchy shared by all szegolab modules."""


class SzegoLabError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(SzegoLabError, ValueError):
    pass


class DomainError(SzegoLabError, ValueError):
    pass


class InvalidParams(SzegoLabError, ValueError):
    pass


class ParseError(SzegoLabError, ValueError):
    """Malformed symbol expression; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SingularSymbol(SzegoLabError, ArithmeticError):
    pass


class EvalError(SingularSymbol):
    """Expression evaluation failed, e.g. inverse of a symbol vanishing on the grid."""


class SingularMatrix(SzegoLabError, ArithmeticError):
    pass


class NonCanonicalSymbol(SzegoLabError):
    """Symbol has nonzero winding or its sections stay singular."""

    def __init__(self, message, winding=None):
        super().__init__(message)
        self.winding = winding


class WindingNonzero(NonCanonicalSymbol):
    pass


class NoConvergence(SzegoLabError, RuntimeError):
    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class GridTooCoarse(NoConvergence):
    pass


class EigenFailure(NoConvergence):
    pass


class TruncationTooSmall(NoConvergence):
    pass
