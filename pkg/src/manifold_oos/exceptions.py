from typing import Optional


class ExtensionError(Exception):
    """Base exception for out-of-sample extension errors."""

    pass


class NumericalError(ExtensionError):
    """Base exception for numerical failures inside an extension method."""

    pass


class InputError(ExtensionError):
    """Base exception for invalid user input or configuration."""

    pass


class ConfigurationError(InputError):
    """Raised when configuration is invalid."""

    pass


class OutOfRangeError(InputError):
    """Raised when an argument lies outside its admissible range."""

    pass


class EmptyNeighborhoodError(NumericalError):
    """Raised when no training point lies within the neighborhood radius."""

    def __init__(self, epsilon: float):
        self.epsilon = epsilon
        super().__init__(f"No training point within epsilon={epsilon:.6g}")


class ZeroDistanceError(NumericalError):
    """Raised when a query coincides with a training point."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Query coincides with training point {index}")


class SingularBlockError(NumericalError):
    """Raised when a precision block is not symmetric positive definite."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Precision block {index} is not positive definite")


class SingularSystemError(NumericalError):
    """Raised when the summed precision matrix cannot be factorized."""

    pass


class SpectrumCutoffError(NumericalError):
    """Raised when an eigenvalue is too small to extend."""

    def __init__(self, eigenvalue: float, threshold: float):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"Eigenvalue {eigenvalue:.3e} below cutoff {threshold:.3e}"
        )


class RankDeficientSketchError(NumericalError):
    """Raised when a random sketch has fewer independent columns than requested."""

    def __init__(self, rank: int, requested: int):
        self.rank = rank
        self.requested = requested
        super().__init__(f"Sketch rank {rank} < requested rank {requested}")


class IllConditionedBasisError(NumericalError):
    """Raised when an extension basis is numerically rank deficient."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(f"Basis condition number {condition:.3e} too large")


class NoConvergenceError(NumericalError):
    """Raised when an iterative scheme exhausts its iterations above tolerance."""

    def __init__(self, achieved_residual: float, iterations: int):
        self.achieved_residual = achieved_residual
        self.iterations = iterations
        super().__init__(
            f"No convergence after {iterations} iterations, "
            f"residual={achieved_residual:.3e}"
        )


class PersistenceError(InputError):
    """Base exception for reading and writing model and table files."""

    pass


class IoFailure(PersistenceError):
    """Raised when a file cannot be read or written."""

    def __init__(self, path: str, cause: Optional[Exception] = None):
        self.path = path
        self.cause = cause
        super().__init__(f"I/O failure on {path}: {cause}")


class SerializationRejected(PersistenceError):
    """Raised when a model holds values that cannot be serialized."""

    pass


class ParseFailure(PersistenceError):
    """Raised when a document or table is malformed."""

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.row = row
        self.column = column
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{location}")


class ValidationFailure(PersistenceError):
    """Raised when loaded data violates a model invariant."""

    pass


class DimensionMismatch(PersistenceError):
    """Raised when a table row has the wrong number of fields."""

    def __init__(self, row: int, expected: int, actual: int):
        self.row = row
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Row {row} has {actual} fields, expected {expected}"
        )
