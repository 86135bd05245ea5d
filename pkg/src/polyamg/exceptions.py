"""Exception types raised across polyamg."""


class InvalidParameterError(ValueError):
    """A generator or algorithm parameter is outside its admissible range."""


class DimensionMismatchError(ValueError):
    """Operand shapes are not conformable."""


class MeshValidationError(ValueError):
    """A mesh violates one of the tessellation invariants."""


class MeshFormatError(ValueError):
    """A mesh file could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    lineno : int
        1-based line number where parsing failed.
    """

    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class AgglomerationError(ValueError):
    """A partition part cannot be merged into a single simple polygon."""

    def __init__(self, message, part):
        super().__init__(f"part {part}: {message}")
        self.part = part


class DegenerateElementError(ValueError):
    """A cell has zero area or collinear vertices, so its projector is singular."""

    def __init__(self, message, cell=None):
        if cell is not None:
            message = f"cell {cell}: {message}"
        super().__init__(message)
        self.cell = cell


class SingularDiagonalError(ZeroDivisionError):
    """A matrix diagonal entry needed for relaxation is zero."""

    def __init__(self, row):
        super().__init__(f"zero diagonal entry in row {row}")
        self.row = row


class NotSPDError(ValueError):
    """A Cholesky factorization met a non-positive pivot."""

    def __init__(self, row):
        super().__init__(f"matrix is not symmetric positive definite (pivot at row {row})")
        self.row = row


class DegenerateCoarseningError(RuntimeError):
    """AMG coarsening failed to reduce the problem size at the finest level."""


class IndefiniteOperatorError(ArithmeticError):
    """CG met a search direction with non-positive energy."""


class IndefinitePreconditionerError(ArithmeticError):
    """The preconditioner produced a non-positive inner product with the residual."""


class NoEstimateError(ValueError):
    """No Lanczos coefficients are available to estimate a condition number."""


class FactorTooLargeError(MemoryError):
    """A direct factorization would exceed its storage budget."""

    def __init__(self, needed, budget):
        super().__init__(f"factor needs {needed} entries, budget is {budget}")
        self.needed = needed
        self.budget = budget
