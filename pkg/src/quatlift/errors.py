"""Exception hierarchy shared by all modules.

``HypothesisViolation`` subclasses map to CLI exit code 2,
``VerificationFailure`` to 3 and ``PrecisionFailure`` to 4.
"""


class QuatliftError(Exception):
    pass


class HypothesisViolation(QuatliftError):
    pass


class VerificationFailure(QuatliftError):
    pass


class PrecisionFailure(QuatliftError):
    pass


class ParityViolation(HypothesisViolation):
    """Hl1: the finite part of the ramification set has the wrong parity."""


class SignViolation(HypothesisViolation):
    """Hl2: sgn(l) != (-1)^k outside skew mode."""


class ConductorClash(HypothesisViolation):
    """conductor(l) is not coprime to 2N."""


class ScopeError(HypothesisViolation):
    pass


class SearchExhausted(QuatliftError):
    pass


class MassMismatch(VerificationFailure):
    pass


class PropagationConflict(VerificationFailure):
    pass


class NotEigen(VerificationFailure):
    pass


class IrrationalEigenvalue(QuatliftError):
    pass


class DimensionMismatch(QuatliftError):
    pass


class RangeError(QuatliftError):
    pass


class NoCoprimeValue(QuatliftError):
    pass


class SingularGram(QuatliftError):
    pass


class MissingPrime(QuatliftError):
    pass


class PrecisionUnreachable(PrecisionFailure):
    pass


class InsufficientPrecision(PrecisionFailure):
    pass
