"""
Exception hierarchy.

Every failure carries the exit code the command line reports for it:
1 for a domain failure (a broken hypothesis, a failed verdict) and 2 for
bad usage or unparseable input.
"""


class PhaseForgeError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(PhaseForgeError):
    exit_code = 1


class UsageError(PhaseForgeError):
    exit_code = 2


# Numerical kernel

class SingularMatrix(DomainError):
    pass


class NoConvergence(DomainError):
    pass


class NonFinite(DomainError):
    pass


class Overflow(DomainError):
    pass


class DimensionMismatch(UsageError):
    pass


# Transform hypotheses

class NotMetzler(DomainError):
    pass


class NotNonnegative(DomainError):
    pass


class NotExcitable(DomainError):
    pass


class NotStable(DomainError):
    pass


class NonpositiveZ(DomainError):
    pass


class InvalidRealization(DomainError):
    pass


# Distributions

class ZeroMass(DomainError):
    pass


class PsiOutOfRange(DomainError):
    pass


class ZeroDensityAtOrigin(DomainError):
    pass


class ProbabilityOutOfRange(DomainError):
    pass


class NegativeTime(UsageError):
    pass


class InvalidCount(UsageError):
    pass


class InvalidRates(UsageError):
    pass
