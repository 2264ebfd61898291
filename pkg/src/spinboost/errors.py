"""Exception types shared across the package."""


class ConsistencyError(RuntimeError):
    """An internal convention check failed (e.g. a Wigner matrix that is
    not a spatial rotation, or a stationarity check on the overlap kernel).
    Signals broken conventions rather than bad user input."""


class AccuracyError(RuntimeError):
    """An integrator finished its budget without reaching the requested
    accuracy. The partial result is attached as ``partial``."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
