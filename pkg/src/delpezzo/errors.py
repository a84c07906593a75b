"""Exception types raised by the library.

Every domain error derives from DelPezzoError so the CLI can map them to
exit status 1 uniformly.
"""


class DelPezzoError(Exception):
    """Base class for all domain errors."""


class NotCoprime(DelPezzoError):
    """Polynomials share a nontrivial common factor."""


class DegenerateCone(DelPezzoError):
    """Cone rays are linearly dependent."""


class NotResidual(DelPezzoError):
    """Operation requires a residual singularity."""


class LocalIndexMismatch(DelPezzoError):
    """Operands have different local indices."""


class MixedIndex(DelPezzoError):
    """Basket mixes local indices where a single one is required."""


class InvalidWeight(DelPezzoError):
    """Weight a is not coprime to the group order r."""


class InvalidFraction(DelPezzoError):
    """Fraction outside the domain of the continued-fraction expansion."""


class NotASurfaceSeries(DelPezzoError):
    """Series lacks the triple pole at t=1 or has constant term != 1."""


class AmbiguousDecomposition(DelPezzoError):
    """The series splitter's linear system has a nontrivial nullspace."""


class NonIntegralDelta(DelPezzoError):
    """Decomposition produced a non-integer delta-vector."""


class NotRealizable(DelPezzoError):
    """Delta-vector does not lie in the delta-lattice."""


class CapacityExceeded(DelPezzoError):
    """A configurable enumeration ceiling was hit; results would be partial."""


class Infeasible(DelPezzoError):
    """No positive degree is compatible with the basket."""


class LengthMismatch(DelPezzoError):
    """Vectors have different lengths."""


class ParseError(DelPezzoError):
    """Malformed text input (singularity or rational-function grammar)."""
