"""Exception types shared across the package.

The CLI maps these onto exit codes: infeasible input -> 2, configuration -> 3.
"""


class MezzoptError(Exception):
    """Base class for all package errors."""


class UsageError(MezzoptError, ValueError):
    """A function was called with arguments outside its contract."""


class ConfigurationError(MezzoptError):
    """The warehouse, layout or parameter set is malformed."""


class InfeasibleError(MezzoptError):
    """The requested task cannot be satisfied by the current warehouse state."""


class InfeasibleTaskError(InfeasibleError):
    """A storage task exceeds the remaining capacity."""


class InfeasibleOrderError(InfeasibleError):
    """A pick list cannot be served from the available stock."""
