"""Exception hierarchy.

Domain errors (bad input, point in a singular set, impossible table cell)
derive from :class:`DomainError`; numerical failures (tolerance not met,
integrand blew up, synthesis could not certify) derive from
:class:`NumericError`.  The CLI maps the two families to exit codes 2 and 3.
"""


class HadamardKitError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HadamardKitError):
    pass


class NumericError(HadamardKitError):
    pass


# sphere_sets
class UndefinedProduct(DomainError):
    pass


class IndeterminateProduct(DomainError):
    pass


class UnrepresentableSet(DomainError):
    pass


# functions
class ParseError(DomainError):
    def __init__(self, message: str, position: int, expected=()):
        self.position = position
        self.expected = tuple(expected)
        exp = f"; expected one of {sorted(self.expected)}" if self.expected else ""
        super().__init__(f"{message} at offset {position}{exp}")


class RejectedExpression(DomainError):
    pass


class UnknownBuiltin(DomainError):
    pass


class SingularPoint(DomainError):
    pass


class BranchCut(SingularPoint):
    pass


class InfinityInSingularSet(DomainError):
    pass


class NoLimit(NumericError):
    pass


class CircleMeetsSingularSet(DomainError):
    pass


class InvalidFunctionDef(DomainError):
    pass


# cycles
class PointOnCycle(DomainError):
    pass


class NotStronglyConvolvable(DomainError):
    pass


class PointInProduct(DomainError):
    pass


class TableCaseImpossible(DomainError):
    pass


class NoMargin(DomainError):
    pass


class SynthesisFailed(NumericError):
    pass


# quadrature
class IntegrandFailure(NumericError):
    def __init__(self, message: str, location=None):
        self.location = location
        super().__init__(message)


class ToleranceNotMet(NumericError):
    pass


# hadamard
class VanishingAtInfinityViolated(DomainError):
    pass


class GridOutsideWindow(DomainError):
    pass


class UndecidableClass(DomainError):
    pass
