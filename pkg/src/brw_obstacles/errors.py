"""Exception types shared across modules."""


class ValidationError(ValueError):
    """Invalid parameters: bad probabilities, dimensions, horizons or laws."""


class CapacityError(RuntimeError):
    """An exact computation would exceed the configured memory budget."""
