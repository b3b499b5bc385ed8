"""
Matrix Waring Architect - Error Types

One hierarchy for every failure the engine can report. Precondition failures
(the caller asked for something outside a theorem's hypotheses) and theorem
contradictions (something the mathematics guarantees did not happen) are kept
apart so the CLI can map them to different exit codes.
"""


class WaringError(Exception):
    """Base class for all errors raised by the logic layer."""


# =====================================
# Gate Failures
# =====================================

class PreconditionViolated(WaringError):
    """Input lies outside the hypotheses of the requested construction."""


class BudgetExceeded(PreconditionViolated):
    """A configured search, factorization or enumeration budget was exceeded."""


class NotMonic(PreconditionViolated):
    pass


class NotIrreducible(PreconditionViolated):
    pass


class NotSimilar(PreconditionViolated):
    pass


class PrescriptionViolation(PreconditionViolated):
    """Prescribed columns do not have the unreduced Hessenberg shape."""


class TraceMismatch(PreconditionViolated):
    pass


class WitnessInvalid(PreconditionViolated):
    pass


class SingularGeometricSum(PreconditionViolated):
    """sum t^(k-1-i) D^i is singular, so the block root equation has no solution."""


class OrderNotCoprime(PreconditionViolated):
    pass


# =====================================
# Arithmetic Failures
# =====================================

class DivisionByZero(WaringError, ZeroDivisionError):
    pass


class ZeroOrderUndefined(WaringError):
    pass


class NoLogarithm(WaringError):
    pass


class SingularMatrix(WaringError):
    pass


class DegenerateBasis(WaringError):
    """The completion basis is dependent, i.e. the matrix was derogatory."""


# =====================================
# Search Failures
# =====================================

class NoSuchPolynomial(WaringError):
    """A polynomial search was exhausted.

    ``guaranteed`` is True when the parameters lie inside a region where a
    theorem promises a hit.
    """

    def __init__(self, message, guaranteed=False):
        super().__init__(message)
        self.guaranteed = guaranteed


class NoDecomposition(WaringError):
    """No sum of k-th powers was found.

    ``guaranteed`` is True when the parameters lie inside a region where a
    theorem promises a decomposition.
    """

    def __init__(self, message, guaranteed=False):
        super().__init__(message)
        self.guaranteed = guaranteed


# =====================================
# Theorem Contradictions
# =====================================

class TheoremContradiction(WaringError):
    """Something a theorem guarantees did not happen: a bug or a discovery."""

    def __init__(self, message, provenance=None):
        super().__init__(message)
        self.provenance = list(provenance or [])


class CoefficientNotInBase(TheoremContradiction):
    pass


class ShapeViolation(TheoremContradiction):
    pass


class CharPolyViolation(TheoremContradiction):
    pass


class FallbackExhausted(TheoremContradiction):
    pass


def is_contradiction(error):
    """True when the error means a guaranteed result failed to materialize."""
    if isinstance(error, TheoremContradiction):
        return True
    return isinstance(error, (NoDecomposition, NoSuchPolynomial)) and error.guaranteed
