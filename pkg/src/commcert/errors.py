"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: verification failures exit 2,
precondition violations exit 3, internal invariant breaches exit 4.
"""


class CommcertError(Exception):
    """Base class for all library errors."""


class PreconditionError(CommcertError):
    """An operation was called outside its documented domain."""


class AlgebraMismatchError(PreconditionError):
    """Operands live over different quaternion algebras."""


class NotDivisionAlgebraError(PreconditionError):
    """A nonzero element had reduced norm zero, so (a, b | Q) is not a
    division algebra for the chosen parameters."""


class ZeroInputError(PreconditionError):
    """A unit of D* was required but zero was supplied."""


class SingularMatrixError(PreconditionError):
    """Row elimination certified the matrix as non-invertible."""


class SingularTwistedSystemError(PreconditionError):
    """The linear system x - p*x*q = r is singular; the caller must
    rescale to separate the reduced norms and retry."""


class VerificationError(CommcertError):
    """A self-check on an emitted object failed (bad certificate, bad
    reassembly, budget overrun)."""


class InternalInvariantError(CommcertError):
    """A state that the construction proves impossible was reached;
    always a bug, never a user error."""
