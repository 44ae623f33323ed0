"""Module with the Gram-Schmidt tensor and the JDE / JDL fusions

Exposes the functions:
- gs_tensor()
- gs_trace()
- gs_tensor_batch()
- jde_distance()
- jde_matrix()
- jdl_matrix()
- sensor_matrices()
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist, squareform

from .core import DelayParams, DissimilarityMatrix, MultiTimeSeries, validate_dissimilarity
from .embedding import pair_difference_vectors, window_indices, window_plan
from .error import DimensionMismatchException, EmptyInputException, SizeMismatchException
from .lib import DEFAULT_CHUNK_SIZE, ProjectionScope, env_workers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GSTrace:
    """What the Gram-Schmidt tensor did to a vector set."""

    order: Tuple[int, ...]
    vectors: NDArray[np.float64]
    value: float


def _as_vector_set(vectors: ArrayLike) -> NDArray[np.float64]:
    try:
        values = np.array(vectors, dtype=np.float64)
    except ValueError as exc:
        raise DimensionMismatchException("All vectors must share one dimension") from exc
    if values.ndim == 1 and values.size == 0:
        raise EmptyInputException("No vectors given")
    if values.ndim != 2:
        raise DimensionMismatchException(f"Expected m vectors of a common dimension, got shape {values.shape}")
    if values.shape[0] == 0:
        raise EmptyInputException("No vectors given")
    return values


def _pivot_floor(count: int, largest_square: float) -> float:
    """Squared norms at or below this are rounding residue of an exact zero."""

    return count * float(np.finfo(np.float64).eps) * largest_square


def gs_trace(vectors: ArrayLike, lam: float, scope: ProjectionScope = ProjectionScope.UNMARKED_ONLY) -> GSTrace:
    """Run the Gram-Schmidt tensor algorithm and keep its trace.

    1. all vectors start unmarked
    2. the unmarked vector w* of largest norm is marked (ties: lowest index)
    3. every other vector w (only the unmarked ones for UNMARKED_ONLY) becomes
       w - lam * <w, w*> / <w*, w*> * w*, skipped when w* is zero, that is when
       |w*|^2 <= m * eps * max |v|^2 over the input vectors
    4. repeat from 2 while unmarked vectors remain
    5. the value is the root-sum-square of the final norms

    Parameters:
    vectors (ArrayLike): m x n array, one vector per row.
    lam (float): Orthogonality parameter in [0, 1].
    scope (ProjectionScope): Which vectors are projected in step 3.

    Returns:
    GSTrace
    """

    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    work = _as_vector_set(vectors).copy()
    count = work.shape[0]
    marked = np.zeros(count, dtype=bool)
    order: List[int] = []
    floor = _pivot_floor(count, float(np.max(np.einsum("ij,ij->i", work, work))))

    for _ in range(count):
        squares = np.einsum("ij,ij->i", work, work)
        star = int(np.argmax(np.where(marked, -np.inf, squares)))
        marked[star] = True
        order.append(star)

        pivot = work[star].copy()
        pivot_square = squares[star]
        if pivot_square <= floor:
            continue
        if scope == ProjectionScope.UNMARKED_ONLY:
            targets = ~marked
        else:
            targets = np.arange(count) != star
        coefficients = lam * (work[targets] @ pivot) / pivot_square
        work[targets] -= coefficients[:, None] * pivot[None, :]

    value = float(np.sqrt(np.sum(work * work)))
    return GSTrace(tuple(order), work, value)


def gs_tensor(vectors: ArrayLike, lam: float, scope: ProjectionScope = ProjectionScope.UNMARKED_ONLY) -> float:
    """N_lambda(V), see gs_trace() for the algorithm."""

    return gs_trace(vectors, lam, scope).value


def gs_tensor_batch(
    vectors: NDArray[np.float64], lam: float, scope: ProjectionScope = ProjectionScope.UNMARKED_ONLY
) -> NDArray[np.float64]:
    """N_lambda over P vector sets at once.

    Parameters:
    vectors (NDArray): P x m x n array, P sets of m vectors.
    lam (float): Orthogonality parameter in [0, 1].
    scope (ProjectionScope): Which vectors are projected in each step.

    Returns:
    NDArray: P values, each equal to gs_tensor() of the matching set.
    """

    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    work = np.array(vectors, dtype=np.float64)
    if work.ndim != 3:
        raise DimensionMismatchException(f"Expected P x m x n vectors, got shape {work.shape}")
    sets, count, _ = work.shape
    if count == 0:
        raise EmptyInputException("No vectors given")
    rows = np.arange(sets)
    marked = np.zeros((sets, count), dtype=bool)
    positions = np.arange(count)[None, :]
    floors = _pivot_floor(count, 1.0) * np.max(np.einsum("pmn,pmn->pm", work, work), axis=1)

    for _ in range(count):
        squares = np.einsum("pmn,pmn->pm", work, work)
        star = np.argmax(np.where(marked, -np.inf, squares), axis=1)
        marked[rows, star] = True
        if lam == 0.0:
            continue

        pivot = work[rows, star]
        pivot_square = squares[rows, star]
        dots = np.einsum("pmn,pn->pm", work, pivot)
        coefficients = np.divide(
            lam * dots,
            pivot_square[:, None],
            out=np.zeros_like(dots),
            where=pivot_square[:, None] > floors[:, None],
        )
        if scope == ProjectionScope.UNMARKED_ONLY:
            targets = ~marked
        else:
            targets = positions != star[:, None]
        work -= (coefficients * targets)[:, :, None] * pivot[:, None, :]

    values: NDArray[np.float64] = np.sqrt(np.einsum("pmn,pmn->p", work, work))
    return values


def jde_distance(ts: MultiTimeSeries, params: DelayParams, t1: int, t2: int) -> float:
    """Joint delay embedding distance between the windows starting at t1 and t2."""

    vectors = pair_difference_vectors(ts, params, [t1], [t2])
    if t1 == t2:
        return 0.0
    return gs_tensor(vectors[0], params.lam, params.scope)


def _window_starts(ts: MultiTimeSeries, params: DelayParams, starts: Optional[ArrayLike]) -> NDArray[np.int64]:
    plan = window_plan(ts.length, params)
    if starts is None:
        return np.arange(plan.n_windows, dtype=np.int64)
    values = np.asarray(starts, dtype=np.int64).reshape(-1)
    for start in values:
        plan.check(int(start))
    return values


def jde_matrix(
    ts: MultiTimeSeries,
    params: DelayParams,
    starts: Optional[ArrayLike] = None,
    workers: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> DissimilarityMatrix:
    """Pairwise JDE distances between windows.

    Every unordered pair is evaluated once; chunks of pairs may run on a thread
    pool and each chunk writes its own slice of the result.

    Parameters:
    ts (MultiTimeSeries): The series.
    params (DelayParams): tau, d, lambda, boundary and scope.
    starts (Optional[ArrayLike]): Window starts, defaults to every valid start.
    workers (Optional[int]): Pool size, defaults to JDE_FUSION_WORKERS.
    chunk_size (int): Pairs per chunk.

    Returns:
    DissimilarityMatrix
    """

    window_starts = _window_starts(ts, params, starts)
    size = window_starts.size
    upper_a, upper_b = np.triu_indices(size, k=1)
    values = np.zeros(upper_a.size, dtype=np.float64)
    bounds = [(low, min(low + chunk_size, upper_a.size)) for low in range(0, upper_a.size, chunk_size)]

    def _chunk(bound: Tuple[int, int]) -> None:
        low, high = bound
        vectors = pair_difference_vectors(
            ts, params, window_starts[upper_a[low:high]], window_starts[upper_b[low:high]]
        )
        values[low:high] = gs_tensor_batch(vectors, params.lam, params.scope)

    if workers is None:
        workers = env_workers()
    logger.debug("JDE matrix of %d windows, %d pairs, %d chunks, %d workers", size, values.size, len(bounds), workers)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_chunk, bounds))
    else:
        for bound in bounds:
            _chunk(bound)

    matrix = np.zeros((size, size), dtype=np.float64)
    matrix[upper_a, upper_b] = values
    matrix[upper_b, upper_a] = values
    return validate_dissimilarity(matrix)


def jdl_matrix(matrices: Sequence[DissimilarityMatrix]) -> DissimilarityMatrix:
    """Joint distance learning: entrywise root-sum-of-squares of per-sensor matrices."""

    if len(matrices) == 0:
        raise EmptyInputException("JDL needs at least one matrix")
    sizes = {matrix.size for matrix in matrices}
    if len(sizes) != 1:
        raise SizeMismatchException(f"Matrices have different sizes {sorted(sizes)}")
    squares = np.zeros_like(matrices[0].values)
    for matrix in matrices:
        squares += matrix.values * matrix.values
    return validate_dissimilarity(np.sqrt(squares))


def sensor_matrices(
    ts: MultiTimeSeries, params: DelayParams, starts: Optional[ArrayLike] = None, windowed: bool = False
) -> List[DissimilarityMatrix]:
    """Per-sensor distance matrices over a set of window starts.

    By default each matrix holds the distances between the raw samples at the
    window starts (window length 1), the input JDL and SNF are given. With
    windowed=True the whole delay windows of the sensor are compared instead.
    """

    window_starts = _window_starts(ts, params, starts)
    plan = window_plan(ts.length, params)
    rows = window_indices(plan)[window_starts]
    matrices: List[DissimilarityMatrix] = []
    for channel in ts.channels:
        if windowed:
            points = channel.samples[rows].reshape(window_starts.size, -1)
        else:
            points = channel.samples[window_starts]
        if window_starts.size == 1:
            matrices.append(validate_dissimilarity(np.zeros((1, 1))))
            continue
        matrices.append(validate_dissimilarity(squareform(pdist(points, metric="euclidean"))))
    return matrices
