"""Exception types raised by the solver library."""


class AmgError(Exception):
    """Base class of every error raised by the ``amg`` package."""


class DimensionMismatchError(AmgError, ValueError):
    def __init__(self, what: str, expected, actual):
        super().__init__(f"{what}: dimension mismatch, expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class IndexOutOfShapeError(AmgError, ValueError):
    pass


class MatrixMarketError(AmgError, ValueError):
    def __init__(self, path, message: str, line: int = None):
        where = f"{path}:{line}" if line is not None else f"{path}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class EmptyVectorError(AmgError, ValueError):
    def __init__(self, path=None):
        super().__init__("empty vector" if path is None else f"{path}: empty vector")
        self.path = path


class ZeroDiagonalError(AmgError, ValueError):
    def __init__(self, row: int):
        super().__init__(f"zero diagonal entry in row {row}")
        self.row = row


class ZeroAggregateError(AmgError, ValueError):
    def __init__(self, aggregate: int):
        super().__init__(
            f"aggregate {aggregate} has only zero near null space entries; "
            f"its interpolation column would be zero")
        self.aggregate = aggregate


class PatternChangedError(AmgError, ValueError):
    def __init__(self, expected_nnz: int, actual_nnz: int):
        super().__init__(
            f"sparsity pattern changed (cached nnz {expected_nnz}, got {actual_nnz}); "
            f"rebuild the Galerkin cache with a fresh setup")
        self.expected_nnz = expected_nnz
        self.actual_nnz = actual_nnz


class SingularCoarseMatrixError(AmgError, ArithmeticError):
    def __init__(self, pivot: int):
        super().__init__(f"coarse grid matrix is singular: zero pivot at index {pivot}")
        self.pivot = pivot


class IndefiniteMatrixError(AmgError, ArithmeticError):
    def __init__(self, curvature: float, iteration: int):
        super().__init__(
            f"p^T A p = {curvature:.3e} <= 0 at iteration {iteration}; the matrix or "
            f"preconditioner is not positive definite, use fgmres instead of pcg")
        self.curvature = curvature
        self.iteration = iteration


class GridSizeError(AmgError, ValueError):
    pass
