"""Storage assignment and order picking optimizers for mezzanine warehouses."""

from .errors import (ConfigurationError, InfeasibleError, InfeasibleOrderError, InfeasibleTaskError,
                     MezzoptError, UsageError)
from .kernels import BACKEND
from .warehouse import Warehouse, apply_allocation, validate_state, validate_storage_solution

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigurationError", "InfeasibleError", "InfeasibleOrderError", "InfeasibleTaskError",
    "MezzoptError", "UsageError", "Warehouse", "apply_allocation", "validate_state",
    "validate_storage_solution",
]
