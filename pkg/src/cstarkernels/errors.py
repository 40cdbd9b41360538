"""Exception types shared across the library."""


class ShapeMismatchError(ValueError):
    """Operands live over incompatible algebra shapes, ranks, or dimensions."""


class PositivityError(ValueError):
    """An input required to be positive (semidefinite) is not.

    Carries the offending extremal eigenvalue when available.
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RangeInclusionError(ValueError):
    """A range-inclusion precondition failed; ``residual`` is the worst column defect."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GapHypothesisError(ValueError):
    """The scaled-kernel gap is not positive definite.

    ``min_eigenvalue`` certifies the violation (most negative eigenvalue of the
    assembled gap matrix).
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class UnknownPointError(ValueError):
    """A point label is not part of the sample."""


class ValidationError(ValueError):
    """Malformed or inconsistent input data; ``path`` locates the problem."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
