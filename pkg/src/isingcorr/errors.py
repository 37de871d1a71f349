"""Exception hierarchy shared by all numerical modules."""


class IsingCorrError(Exception):
    """Base class for errors raised by this package."""


class DomainError(IsingCorrError, ValueError):
    """Argument outside the domain of a function."""


class RegimeError(IsingCorrError):
    """Quantity leaves the physical regime (e.g. a nonpositive radicand)."""


class DegeneracyError(IsingCorrError):
    """A recurrence or linear system degenerates (vanishing pivot/leading term)."""

    def __init__(self, message, order=None):
        super().__init__(message)
        self.order = order


class NearSingularError(IsingCorrError):
    """Evaluation point lies too close to the integration contour."""

    def __init__(self, message, z=None, nodes=None):
        super().__init__(message)
        self.z = z
        self.nodes = nodes


class ConvergenceError(IsingCorrError):
    """Node doubling hit its cap before successive values agreed."""

    def __init__(self, message, previous=None, last=None, nodes=None):
        super().__init__(message)
        self.previous = previous
        self.last = last
        self.nodes = nodes


class EvaluationError(IsingCorrError):
    """Integrand produced a non-finite value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DiscontinuityError(IsingCorrError):
    """One-sided limits disagree where continuity is expected."""

    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class ValidationError(IsingCorrError):
    """Independent evaluation routes disagree beyond tolerance."""
