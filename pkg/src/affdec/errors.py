"""Exception types shared across the library."""


class AffdecError(Exception):
    """Base class for library errors."""


class ZeroPolynomial(AffdecError):
    """Normalization of the zero polynomial was requested."""


class BudgetExceeded(AffdecError):
    """A configured work cap (subdivision count, grid size) was exceeded."""


class OracleMissingDerivative(AffdecError):
    """The derivative oracle did not supply a required partial derivative."""


class DegenerateParallelogram(AffdecError):
    """The defining affine map is singular."""


class EnclosureTooLoose(AffdecError):
    """A certified range straddles a decision threshold even at tight tolerance."""


class NotBounded(AffdecError):
    """A polynomial exceeded the declared coefficient bound."""


class GradientHypothesisFails(AffdecError):
    """The certified gradient range violated the comparable-size hypothesis."""


class RecursionDepthExceeded(AffdecError):
    """Degree recursion or tree iteration exceeded its cap."""


class HPreconditionFails(AffdecError):
    """The induction step was called below its certified threshold."""


class NodeOutsideSupport(AffdecError):
    """A frequency node lies outside its declared neighborhood."""


class UnassignedNode(AffdecError):
    """A frequency node belongs to no member of the covering family."""


class PreconditionFails(AffdecError):
    """A stated precondition of a verification routine failed."""


class QuadratureNonConvergent(AffdecError):
    """Adaptive quadrature failed to converge within its budget."""


class ValidationFailed(AffdecError):
    """A decomposition failed re-validation; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
