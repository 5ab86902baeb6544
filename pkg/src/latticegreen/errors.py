"""Exception types shared across the library."""


class LatticeGreenError(Exception):
    """Base class for all library errors."""


class UnivalenceViolation(LatticeGreenError):
    """Coefficients fail the sufficient injectivity certificate."""


class InversionDiverged(LatticeGreenError):
    """Numeric inverse of the conformal map found no root in budget."""


class BlobPlacementFailed(LatticeGreenError):
    """Requested blob scale is too large for the domain geometry."""


class Disconnected(LatticeGreenError):
    """Lattice discretization produced more than one component."""


class BlobTouchesBoundary(LatticeGreenError):
    """A blob vertex is missing or has degree below 4."""


class SolverStalled(LatticeGreenError):
    """Iterative solver failed to reach tolerance within its cap."""


class BudgetExceeded(LatticeGreenError):
    """Uniformization truncation order exceeds the configured cap."""


class QuadratureUnconverged(LatticeGreenError):
    """Doubling the radial rule moved the result above tolerance."""


class ObstacleInvalid(LatticeGreenError):
    """An experiment obstacle violates its preconditions."""


class PairInvalid(LatticeGreenError):
    """A point pair violates the experiment preconditions."""
