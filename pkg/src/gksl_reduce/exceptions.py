"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ReductionError`, so callers (and the CLI) can map failures onto
exit codes without catching unrelated ``ValueError``s.
"""


class ReductionError(Exception):
    """Base class for all package errors."""


class DimensionError(ReductionError, ValueError):
    """Operands have incompatible or invalid shapes."""


class NonFiniteError(ReductionError, ValueError):
    """An input contains NaN or infinite entries."""


class NotHermitianError(ReductionError, ValueError):
    """An operator required to be Hermitian is not, within tolerance."""


class DegenerateBasisError(ReductionError):
    """Gram-Schmidt met a (numerically) linearly dependent element."""


class HypothesisViolatedError(ReductionError):
    """The fast generator does not converge exponentially to its kernel.

    Raised when there are no fast eigenvalues at all, or when some
    eigenvalue outside the zero cluster has a real part that is not
    strictly negative (marginal or oscillating modes).
    """


class NonSemisimpleKernelError(ReductionError):
    """The zero eigenvalue of the fast generator has a Jordan block."""


class IllConditionedSplitError(ReductionError):
    """The slow basis and invariant operators fail biorthogonality."""


class SingularResolventError(ReductionError):
    """The pseudo-resolvent solve did not meet its residual tolerance."""


class RecursionInconsistencyError(ReductionError):
    """An order-n invariance residual exceeded tolerance."""


class RegimeExceededError(ReductionError):
    """The pairing matrix is singular: epsilon is beyond the valid regime."""


class ExponentialRangeError(ReductionError, OverflowError):
    """Matrix exponential overflowed for the requested time."""
