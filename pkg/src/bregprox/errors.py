"""Exception types shared across the package."""


class BregproxError(Exception):
    """Base class for all library errors."""


class DomainError(BregproxError):
    """A point lies outside the (interior of the) required domain."""


class HessianUnavailable(BregproxError):
    """The kernel is not C^2 at the requested point."""


class NotProxBounded(BregproxError):
    """The prox subproblem is unbounded below at the given step size."""


class MultivaluedProx(BregproxError):
    """A single-valued prox was required but several minimizers were found."""

    def __init__(self, message, minimizers=None):
        super().__init__(message)
        self.minimizers = list(minimizers) if minimizers is not None else []


class CrossCheckFailure(BregproxError):
    """Two independent evaluation routes disagree beyond tolerance."""


class UnboundedSubproblem(BregproxError):
    """An algorithm subproblem has no minimizer."""


class ConfigError(BregproxError):
    """Invalid CLI / suite configuration."""
