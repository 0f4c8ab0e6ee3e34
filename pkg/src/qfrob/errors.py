"""Exception types shared across the package."""


class QFrobError(Exception):
    """Base class for all errors raised by qfrob."""


class DenominatorNotUnit(QFrobError):
    """A rational has a denominator divisible by p, so it is not in Z_p."""


class PrecisionExceeded(QFrobError):
    """More digits were requested than the working modulus carries."""


class PrecisionExhausted(QFrobError):
    """Valuation losses consumed the whole working precision."""


class NonUnitDivisor(QFrobError):
    """Division by an element of positive valuation."""


class NonUnitConstantTerm(QFrobError):
    """Series inversion needs a constant term of valuation zero."""


class SingularConstantTerm(QFrobError):
    """The constant term of a series matrix is singular mod p^W."""


class DegenerateDenominator(QFrobError):
    """A denominator factor of a hypergeometric coefficient is exactly zero."""


class NoStabilization(QFrobError):
    """Integer-representative evaluation did not stabilize within the cap."""


class NoSurvivor(QFrobError):
    """No candidate digit passed the rationality test at some stage."""


class MultipleSurvivors(QFrobError):
    """The search could not single out one digit string."""

    def __init__(self, message, survivors=None):
        super().__init__(message)
        self.survivors = survivors or []
