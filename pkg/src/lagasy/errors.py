"""Exception hierarchy shared by all modules."""


class LagasyError(Exception):
    """Base class for every error raised by the package."""


class MalformedSpec(LagasyError, ValueError):
    pass


class AlphaOutOfRange(LagasyError, ValueError):
    pass


class NonPositiveLeading(LagasyError, ValueError):
    pass


class EvaluatorFailure(LagasyError, ArithmeticError):
    pass


class RangeExceeded(LagasyError, ValueError):
    pass


class OrderOutOfRange(LagasyError, ValueError):
    pass


class DomainError(LagasyError, ValueError):
    pass


class WrongKind(LagasyError, TypeError):
    pass


class NoBracket(LagasyError, ArithmeticError):
    pass


class QuadratureStall(LagasyError, ArithmeticError):
    pass


class ContourPole(LagasyError, ArithmeticError):
    pass


class OnCut(LagasyError, ValueError):
    pass


class TruncationTooSmall(LagasyError, ValueError):
    pass


class WrongRegime(LagasyError, ValueError):
    pass


class NotTabulated(LagasyError, KeyError):
    pass


class RegionMismatch(LagasyError, ValueError):
    pass


class NegativeRadicand(LagasyError, ArithmeticError):
    def __init__(self, message, terms=None):
        super().__init__(message)
        self.terms = terms


class PrecisionUnreachable(LagasyError, ArithmeticError):
    pass


class TailTruncationFailure(LagasyError, ArithmeticError):
    pass


class DegreeExceedsTable(LagasyError, IndexError):
    pass


class NewtonDivergence(LagasyError, ArithmeticError):
    def __init__(self, message, index=None, seed=None):
        super().__init__(message)
        self.index = index
        self.seed = seed


class NodeCollision(LagasyError, ArithmeticError):
    pass
