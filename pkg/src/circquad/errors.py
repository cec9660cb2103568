"""Exception hierarchy shared by all modules."""


class CircQuadError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CircQuadError, ValueError):
    pass


class DuplicateNode(DomainError):
    pass


class NearDuplicateNode(DuplicateNode):
    pass


class TooFewNodes(DomainError):
    pass


class InvalidMeasure(CircQuadError, ValueError):
    pass


class MomentOutOfRange(CircQuadError, IndexError):
    pass


class DerivativeUnavailable(CircQuadError):
    pass


class InfeasibleSelection(CircQuadError):
    """No injective mimic-node assignment exists for the requested degree."""


class ConfigError(CircQuadError, ValueError):
    pass


class NumericalError(CircQuadError, ArithmeticError):
    pass


class ZeroFindingError(NumericalError):
    pass


class RankDeficiency(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, best=None, gap=None):
        super().__init__(message)
        self.best = best
        self.gap = gap
