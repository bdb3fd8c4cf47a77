"""Exception types shared by every module.

The CLI maps these onto exit codes: input and semantics errors exit 2,
resource errors exit 3. Numeric errors (solver non-convergence) also exit 3.
"""


class SpectralBoundsError(Exception):
    """Base class for toolkit errors."""


class InputError(SpectralBoundsError, ValueError):
    """Malformed or out-of-range input (bad vertex ids, overlapping sets, ...)."""


class ResourceError(SpectralBoundsError, RuntimeError):
    """A size or iteration budget would be exceeded."""


class NumericError(SpectralBoundsError, ArithmeticError):
    """An iterative method failed to converge.

    ``residual`` carries the last residual norm when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SemanticsError(SpectralBoundsError, ValueError):
    """Estimates with incompatible meaning were combined (e.g. heuristic vs heuristic)."""
