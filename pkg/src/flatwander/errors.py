"""Domain errors. Every error carries a machine-readable ``code`` for the CLI."""

from __future__ import annotations


class FlatwanderError(Exception):
    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)


class ParseError(FlatwanderError):
    """Input text does not conform to the number-expression grammar."""

    code = "syntax"


class MixedRadicals(FlatwanderError):
    """Two distinct square-free radicands were combined in one scalar."""

    code = "mixed-radicals"


class LowerHalfPlane(FlatwanderError):
    code = "lower-half-plane"


class NotACovering(FlatwanderError):
    code = "not-a-covering"


class DegreeTooLow(FlatwanderError):
    code = "degree-too-low"


class IncompatibleField(FlatwanderError):
    code = "incompatible-field"


class FieldClash(FlatwanderError):
    """Base-point radicand equals the slope radicand; transverse coordinates
    would not be unique."""

    code = "field-clash"


class SlopeNotInvariant(FlatwanderError):
    code = "slope-not-invariant"


class IrrationalOffset(FlatwanderError):
    """Line classification requires a rational translation part."""

    code = "irrational-offset"


class DegenerateSegment(FlatwanderError):
    code = "degenerate-segment"


class UncertainAtTolerance(FlatwanderError):
    """A float-mode predicate came within tolerance of degeneracy."""

    code = "uncertain-at-tolerance"


class BudgetExceeded(FlatwanderError):
    code = "budget-exceeded"


class NotLattesCompatible(FlatwanderError):
    code = "not-lattes-compatible"


class WrongLatticeForGroup(FlatwanderError):
    code = "wrong-lattice-for-group"


class OddPeriodPairing(FlatwanderError):
    """Internal inconsistency: an involution paired a cycle of odd period."""

    code = "odd-period-pairing"


class NearPole(FlatwanderError):
    code = "near-pole"


class FitIllConditioned(FlatwanderError):
    code = "fit-ill-conditioned"


class ResidualExceedsTol(FlatwanderError):
    code = "residual-exceeds-tol"


class UsageError(FlatwanderError):
    code = "usage"


class IoError(FlatwanderError):
    code = "io"
