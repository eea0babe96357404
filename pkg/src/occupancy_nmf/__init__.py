"""Days-as-columns NMF for building occupancy counts."""

from .exceptions import InputError, NumericalError, OccupancyNMFError
from .nmf import DailyNMF, Factorization, NmfConfig, fit

__version__ = "0.1.0"

__all__ = [
    "DailyNMF",
    "Factorization",
    "InputError",
    "NmfConfig",
    "NumericalError",
    "OccupancyNMFError",
    "fit",
]
