"""Exception types shared across the package.

Everything derives from DpplabError so callers (and the CLI, which maps
these to exit code 2) can catch precondition violations in one place.
"""


class DpplabError(Exception):
    """Base class for all argument/precondition failures raised here."""


class DimensionError(DpplabError):
    """Matrix or vector shapes do not match the operation."""


class SymmetryError(DpplabError):
    """Input required to be Hermitian is not."""


class DependenceError(DpplabError):
    """Vectors are linearly dependent under the given inner product."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ArgumentError(DpplabError):
    """Invalid argument value."""


class SizeError(DpplabError):
    """Instance exceeds a documented enumeration or size cap."""


class DomainError(DpplabError):
    """Input outside the mathematical domain (e.g. inadmissible kernel)."""


class DegeneracyError(DpplabError):
    """Singular or numerically degenerate input."""


class SupportError(DpplabError):
    """Configuration lies outside the distribution's support."""


class PreconditionError(DpplabError):
    """A stated hypothesis of the check does not hold for the input."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class ResampleError(DpplabError):
    """Sampler hit the degenerate-step retry limit."""
