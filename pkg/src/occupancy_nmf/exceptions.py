class OccupancyNMFError(Exception):
    """Base class for errors raised by this package."""


class InputError(OccupancyNMFError, ValueError):
    """Invalid input data or configuration."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class NumericalError(OccupancyNMFError, ArithmeticError):
    """A solver produced a non-finite value."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
