"""Module with classical MDS and matrix comparison metrics

Exposes the functions:
- classical_mds()
- scale_aligned_error()
- offdiag_correlation()
- evaluate()
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from .core import DissimilarityMatrix, SimilarityMatrix, validate_dissimilarity
from .error import ConstantInputException, ConvergenceFailureException, SizeMismatchException, ZeroMatrixException
from .lib import CorrelationMethod, MatrixKind, SimilarityKind
from .snf import SnfConfig, full_kernel, similarity_view

logger = logging.getLogger(__name__)

# Dimension of the MDS used to report how non-Euclidean a fused matrix is
EVALUATION_MDS_DIM = 3


@dataclass(frozen=True)
class MdsResult:
    """Coordinates of a classical MDS embedding."""

    coordinates: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    negative_mass: float
    spectrum: NDArray[np.float64]


def classical_mds(distances: DissimilarityMatrix, k: int) -> MdsResult:
    """Classical (Torgerson) MDS of a dissimilarity matrix.

    B = -1/2 J (D o D) J with J = I - 11^T / N is diagonalised with LAPACK's
    symmetric solver (numpy.linalg.eigh); the top k eigenvectors scaled by the
    square root of their clamped eigenvalues are the coordinates. The sign of
    each column is fixed so that its largest magnitude entry is positive.

    Parameters:
    distances (DissimilarityMatrix): D.
    k (int): Target dimension, 1 <= k < N.

    Returns:
    MdsResult
    """

    size = distances.size
    if not 1 <= k < size:
        raise ValueError(f"Target dimension must satisfy 1 <= k < N={size}, got {k}")

    squared = distances.values * distances.values
    centering = np.eye(size) - np.ones((size, size)) / size
    gram = -0.5 * centering @ squared @ centering
    gram = (gram + gram.T) / 2.0
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailureException(f"Eigen-solve of a {size} x {size} matrix failed: {exc}") from exc

    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    total = float(np.sum(np.abs(eigenvalues)))
    negative_mass = float(np.sum(np.abs(eigenvalues[eigenvalues < 0.0])) / total) if total > 0.0 else 0.0

    kept = np.maximum(eigenvalues[:k], 0.0)
    vectors = eigenvectors[:, :k].copy()
    for column in range(k):
        if vectors[np.argmax(np.abs(vectors[:, column])), column] < 0.0:
            vectors[:, column] *= -1.0
    coordinates = vectors * np.sqrt(kept)[None, :]
    logger.debug("MDS of %d points into %d dims, negative mass %.3g", size, k, negative_mass)
    return MdsResult(coordinates, kept, negative_mass, eigenvalues)


def _same_shape(first: NDArray[np.float64], second: NDArray[np.float64]) -> None:
    if first.shape != second.shape:
        raise SizeMismatchException(f"Matrices have shapes {first.shape} and {second.shape}")


def scale_aligned_error(first: ArrayLike, second: ArrayLike) -> float:
    """min over alpha of ||alpha A - B||_F / ||B||_F, alpha = <A, B>_F / <A, A>_F."""

    values_a = np.asarray(first, dtype=np.float64)
    values_b = np.asarray(second, dtype=np.float64)
    _same_shape(values_a, values_b)
    norm_b = float(np.linalg.norm(values_b))
    if norm_b == 0.0:
        raise ZeroMatrixException()
    inner_aa = float(np.sum(values_a * values_a))
    alpha = float(np.sum(values_a * values_b)) / inner_aa if inner_aa > 0.0 else 0.0
    return float(np.linalg.norm(alpha * values_a - values_b)) / norm_b


def offdiag_correlation(
    first: ArrayLike, second: ArrayLike, method: CorrelationMethod = CorrelationMethod.PEARSON
) -> float:
    """Correlation of the strict upper-triangle entries of two matrices.

    Spearman ranks ties by their average rank.
    """

    values_a = np.asarray(first, dtype=np.float64)
    values_b = np.asarray(second, dtype=np.float64)
    _same_shape(values_a, values_b)
    if values_a.ndim != 2 or values_a.shape[0] != values_a.shape[1] or values_a.shape[0] < 3:
        raise ValueError("Correlation needs square matrices with N >= 3")
    upper = np.triu_indices(values_a.shape[0], k=1)
    entries_a = values_a[upper]
    entries_b = values_b[upper]
    if np.ptp(entries_a) == 0.0 or np.ptp(entries_b) == 0.0:
        raise ConstantInputException()
    if method == CorrelationMethod.SPEARMAN:
        result = stats.spearmanr(entries_a, entries_b)
    else:
        result = stats.pearsonr(entries_a, entries_b)
    return float(np.clip(result[0], -1.0, 1.0))


@dataclass
class EvaluationReport:
    """How close a fused matrix is to the ground truth."""

    method: str
    params: Dict[str, Any] = field(default_factory=dict)
    scale_aligned_error: float = 0.0
    pearson: float = 0.0
    spearman: float = 0.0
    negative_mass: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        """JSON friendly form."""
        return asdict(self)


def evaluate(
    fused: ArrayLike,
    truth: DissimilarityMatrix,
    kind: MatrixKind,
    method: str,
    params: Optional[Dict[str, Any]] = None,
    snf_config: Optional[SnfConfig] = None,
) -> EvaluationReport:
    """Compare a fused matrix with the ground truth.

    Distance fusions are compared with the truth directly. Similarity fusions
    are compared with the truth turned into a P kernel; full_kernel is applied
    to the fused matrix as well so that both sides are row normalised the same way.
    """

    values = np.asarray(fused, dtype=np.float64)
    if kind == MatrixKind.DISTANCE:
        matrix = validate_dissimilarity(values)
        reference = truth.values
        candidate = matrix.values
        negative_mass: Optional[float] = None
        if matrix.size > EVALUATION_MDS_DIM:
            negative_mass = classical_mds(matrix, EVALUATION_MDS_DIM).negative_mass
    else:
        if snf_config is None:
            snf_config = SnfConfig()
        reference = np.array(similarity_view(truth, snf_config).values)
        candidate = np.array(full_kernel(SimilarityMatrix(values, SimilarityKind.FUSED)).values)
        negative_mass = None

    return EvaluationReport(
        method=method,
        params=dict(params or {}),
        scale_aligned_error=scale_aligned_error(candidate, reference),
        pearson=offdiag_correlation(candidate, reference, CorrelationMethod.PEARSON),
        spearman=offdiag_correlation(candidate, reference, CorrelationMethod.SPEARMAN),
        negative_mass=negative_mass,
    )
