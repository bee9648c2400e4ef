"""Exception types shared across the package."""


class BifbmlabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BifbmlabError, ValueError):
    """A numeric argument is outside its mathematical domain."""


class ConfigError(BifbmlabError, ValueError):
    """A run configuration is malformed or inconsistent."""


class NotPositiveSemidefinite(BifbmlabError):
    """A covariance matrix failed the positive-semidefiniteness check."""


class FactorizationFailed(BifbmlabError):
    """Cholesky factorization failed even after jitter escalation."""


class PreconditionViolated(BifbmlabError):
    """A mathematical precondition that must hold by construction was found false.

    Raised when a comparison hypothesis fails in a regime where the theory
    guarantees it, which indicates a defect in the kernel code rather than
    an inapplicable check.
    """
