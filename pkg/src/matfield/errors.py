"""Exception types shared across the package."""


class MatfieldError(Exception):
    """Base class for every error raised by this package."""


class InvalidMatrix(MatfieldError):
    """Input matrix violates a structural requirement (non-finite, non-Hermitian, ...)."""


class ShapeError(MatfieldError):
    """Operands have incompatible dimensions."""


class NotPSD(MatfieldError):
    """A matrix required to be positive semi-definite is not."""


class NotPD(MatfieldError):
    """A matrix required to be strictly positive definite is not."""


class InvalidWeight(MatfieldError):
    """Negative or otherwise unusable scalar weights."""


class Unsupported(MatfieldError):
    """Requested configuration is outside the closed-form design scope."""


class PreconditionError(MatfieldError):
    """A documented caller-side precondition was violated."""


class NumericalError(MatfieldError):
    """A numerical routine failed or produced internally inconsistent results."""


class ConfigError(MatfieldError):
    """Malformed experiment configuration."""
