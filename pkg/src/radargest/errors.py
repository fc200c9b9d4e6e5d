"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument lies outside its valid domain.

    The CLI maps this to exit code 2.
    """


class NonFiniteError(FloatingPointError):
    """A NaN or Inf appeared in a tensor where finite values are required."""


class FormatError(ValueError):
    """A dataset or checkpoint file is malformed or does not match its spec."""
