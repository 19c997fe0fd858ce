"""Exception classes shared across the package."""


class ParameterError(ValueError):
    """Invalid model or sampler parameters."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class InputError(ValueError):
    """Malformed matrix or data input (e.g. an asymmetric matrix)."""


class NumericalRangeError(ArithmeticError):
    """A quantity left the representable floating-point range."""
