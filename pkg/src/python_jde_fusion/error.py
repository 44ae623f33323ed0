"""
Module which have all our exceptions
"""


class JdeFusionException(Exception):
    """Base exception for everything raised by this package."""

    def __init__(self, message: str = "JDE fusion exception happened.") -> None:
        self.message = message
        super().__init__(self.message)


class NonSquareException(JdeFusionException):
    """Exception for a matrix which is not square."""

    def __init__(self, message: str = "Matrix is not square.") -> None:
        super().__init__(message)


class NegativeEntryException(JdeFusionException):
    """Exception for a dissimilarity matrix with a negative entry."""

    def __init__(self, message: str = "Dissimilarity matrix has a negative entry.") -> None:
        super().__init__(message)


class NonzeroDiagonalException(JdeFusionException):
    """Exception for a dissimilarity matrix with a nonzero diagonal."""

    def __init__(self, message: str = "Dissimilarity matrix has a nonzero diagonal.") -> None:
        super().__init__(message)


class AsymmetryTooLargeException(JdeFusionException):
    """Exception for a dissimilarity matrix which is not symmetric."""

    def __init__(self, message: str = "Dissimilarity matrix is not symmetric.") -> None:
        super().__init__(message)


class IndexOutOfRangeException(JdeFusionException):
    """Exception for a channel or sample index outside the series."""

    def __init__(self, message: str = "Index out of range.") -> None:
        super().__init__(message)


class WindowOutOfRangeException(JdeFusionException):
    """Exception for a window start which does not fit inside the series."""

    def __init__(self, message: str = "Window start out of range.") -> None:
        super().__init__(message)


class DimensionMismatchException(JdeFusionException):
    """Exception for vectors or samples of inconsistent dimension."""

    def __init__(self, message: str = "Dimension mismatch.") -> None:
        super().__init__(message)


class EmptyInputException(JdeFusionException):
    """Exception for an empty collection of vectors or channels."""

    def __init__(self, message: str = "Empty input.") -> None:
        super().__init__(message)


class SizeMismatchException(JdeFusionException):
    """Exception for matrices of different sizes which must agree."""

    def __init__(self, message: str = "Matrices have different sizes.") -> None:
        super().__init__(message)


class ZeroRowSumException(JdeFusionException):
    """Exception for a similarity row without any off-diagonal mass."""

    def __init__(self, message: str = "Similarity row has zero off-diagonal sum.") -> None:
        super().__init__(message)


class EmptyNeighborhoodException(JdeFusionException):
    """Exception for a nearest neighbor set which is empty once the point itself is removed."""

    def __init__(self, message: str = "kappa * N is too small, neighborhood is empty.") -> None:
        super().__init__(message)


class TooFewViewsException(JdeFusionException):
    """Exception for a fusion with less than two views."""

    def __init__(self, message: str = "At least two views are required.") -> None:
        super().__init__(message)


class NonUnitProjectionException(JdeFusionException):
    """Exception for a projection sensor whose vector is not of unit length."""

    def __init__(self, message: str = "Projection vector must have unit norm.") -> None:
        super().__init__(message)


class ConvergenceFailureException(JdeFusionException):
    """Exception for a symmetric eigen-solve that did not converge."""

    def __init__(self, message: str = "Eigen-solver did not converge.") -> None:
        super().__init__(message)


class ZeroMatrixException(JdeFusionException):
    """Exception for a reference matrix which is identically zero."""

    def __init__(self, message: str = "Reference matrix is zero.") -> None:
        super().__init__(message)


class ConstantInputException(JdeFusionException):
    """Exception for a correlation over values without variance."""

    def __init__(self, message: str = "Input values are constant.") -> None:
        super().__init__(message)


class ThresholdRequiredException(JdeFusionException):
    """Exception for a dimension 2 persistence computation without finite threshold."""

    def __init__(self, message: str = "An explicit finite threshold is required for max_dim=2.") -> None:
        super().__init__(message)


class BudgetExceededException(JdeFusionException):
    """Exception for a Rips filtration with more simplices than allowed."""

    def __init__(self, message: str = "Simplex budget exceeded.") -> None:
        super().__init__(message)


class MissingColumnException(JdeFusionException):
    """Exception for a trial file without a required modality column."""

    def __init__(self, message: str = "Required column not found.") -> None:
        super().__init__(message)


class TooFewRowsException(JdeFusionException):
    """Exception for a trial file with less data rows than requested."""

    def __init__(self, message: str = "Not enough data rows.") -> None:
        super().__init__(message)


class UnparseableNumberException(JdeFusionException):
    """Exception for a cell which is not a decimal number."""

    def __init__(self, message: str = "Could not parse number.") -> None:
        super().__init__(message)
