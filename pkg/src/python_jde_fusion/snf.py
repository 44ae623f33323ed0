"""Module with Similarity Network Fusion

Exposes the functions:
- neighbor_set()
- sigma()
- to_similarity()
- full_kernel()
- sparse_kernel()
- snf_fuse()
- similarity_view()
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .core import DissimilarityMatrix, SimilarityMatrix
from .error import (
    EmptyNeighborhoodException,
    SizeMismatchException,
    TooFewViewsException,
    ZeroRowSumException,
)
from .lib import DEFAULT_BETA, DEFAULT_ITERATIONS, DEFAULT_KAPPA, SimilarityKind

logger = logging.getLogger(__name__)

# Slack so that e.g. 0.29 * 100 floors to 29 and not 28
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class SnfConfig:
    """SNF constants: kernel width beta, neighborhood fraction kappa and the iteration schedule."""

    beta: float = DEFAULT_BETA
    kappa: float = DEFAULT_KAPPA
    iterations: int = DEFAULT_ITERATIONS
    symmetrize_each_step: bool = False
    synchronous: bool = False

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0.0 < self.kappa <= 1.0:
            raise ValueError(f"kappa must be in (0, 1], got {self.kappa}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")


def neighbor_count(size: int, kappa: float) -> int:
    """floor(kappa * N), at least 1."""

    return max(1, min(size, int(math.floor(kappa * size + _FLOOR_SLACK))))


def _neighbor_table(distances: NDArray[np.float64], kappa: float) -> NDArray[np.int64]:
    """N x floor(kappa N) table, row i lists N^kappa(i) with i itself first."""

    size = distances.shape[0]
    count = neighbor_count(size, kappa)
    keyed = np.array(distances, dtype=np.float64)
    # i always ranks first, equal distances keep index order
    np.fill_diagonal(keyed, -np.inf)
    table: NDArray[np.int64] = np.argsort(keyed, axis=1, kind="stable")[:, :count].astype(np.int64)
    return table


def neighbor_set(distances: DissimilarityMatrix, i: int, kappa: float) -> List[int]:
    """N^kappa(i): the floor(kappa N) nearest points to i, i included.

    Parameters:
    distances (DissimilarityMatrix): D, with N >= 2.
    i (int): Point index.
    kappa (float): Neighborhood fraction.

    Returns:
    List[int]: Indices in order of increasing distance, ties by lower index.
    """

    if distances.size < 2:
        raise ValueError("Neighbor sets need at least two points")
    if not 0 <= i < distances.size:
        raise ValueError(f"Point index {i} outside [0, {distances.size})")
    return [int(index) for index in _neighbor_row(distances.values, i, kappa)]


def _neighbor_row(values: NDArray[np.float64], i: int, kappa: float) -> NDArray[np.int64]:
    row = np.array(values[i], dtype=np.float64)
    row[i] = -np.inf
    order: NDArray[np.int64] = np.argsort(row, kind="stable")[: neighbor_count(row.size, kappa)].astype(np.int64)
    return order


def _sigma_matrix(values: NDArray[np.float64], beta: float, kappa: float) -> NDArray[np.float64]:
    size = values.shape[0]
    table = _neighbor_table(values, kappa)
    # the divisor is the real number kappa * N, not the neighbor count
    local = np.take_along_axis(values, table, axis=1).sum(axis=1) / (kappa * size)
    sigmas: NDArray[np.float64] = (beta / 3.0) * (local[:, None] + local[None, :] + values)
    return sigmas


def sigma(distances: DissimilarityMatrix, i: int, j: int, beta: float, kappa: float) -> float:
    """Sigma_ij: beta/3 times the mean neighbor distances of i and j plus D_ij."""

    values = distances.values
    size = distances.size
    local_i = values[i, _neighbor_row(values, i, kappa)].sum() / (kappa * size)
    local_j = values[j, _neighbor_row(values, j, kappa)].sum() / (kappa * size)
    return float((beta / 3.0) * (local_i + local_j + values[i, j]))


def to_similarity(distances: DissimilarityMatrix, beta: float, kappa: float) -> SimilarityMatrix:
    """W_ij = exp(-D_ij^2 / Sigma_ij), with W_ij = 1 wherever D_ij = 0."""

    values = distances.values
    sigmas = _sigma_matrix(values, beta, kappa)
    exponent = np.divide(values * values, sigmas, out=np.zeros_like(values), where=values > 0.0)
    weights = np.exp(-exponent)
    np.fill_diagonal(weights, 1.0)
    return SimilarityMatrix(weights, SimilarityKind.W)


def _off_diagonal(weights: NDArray[np.float64]) -> NDArray[np.float64]:
    values = np.array(weights, dtype=np.float64)
    np.fill_diagonal(values, 0.0)
    return values


def full_kernel(weights: SimilarityMatrix) -> SimilarityMatrix:
    """P: off-diagonal W_ij / (2 sum_{k != i} W_ik), 1/2 on the diagonal."""

    off = _off_diagonal(weights.values)
    sums = off.sum(axis=1)
    if np.any(sums <= 0.0):
        row = int(np.flatnonzero(sums <= 0.0)[0])
        raise ZeroRowSumException(f"Row {row} has no off-diagonal similarity")
    kernel = off / (2.0 * sums[:, None])
    np.fill_diagonal(kernel, 0.5)
    return SimilarityMatrix(kernel, SimilarityKind.P)


def sparse_kernel(
    weights: SimilarityMatrix, kappa: float, distances: Optional[DissimilarityMatrix] = None
) -> SimilarityMatrix:
    """S: P restricted to N_i = N^kappa(i) minus i.

    The neighbor sets come from the distances when given; otherwise from the
    similarities, largest first.
    """

    size = weights.size
    if neighbor_count(size, kappa) < 2:
        raise EmptyNeighborhoodException(f"floor(kappa * N) = {neighbor_count(size, kappa)} leaves no neighbors")
    if distances is not None:
        if distances.size != size:
            raise SizeMismatchException("Distances and similarities have different sizes")
        table = _neighbor_table(distances.values, kappa)
    else:
        table = _neighbor_table(-np.asarray(weights.values), kappa)
    neighbors = table[:, 1:]
    rows = np.arange(size)[:, None]

    picked = weights.values[rows, neighbors]
    sums = picked.sum(axis=1)
    if np.any(sums <= 0.0):
        row = int(np.flatnonzero(sums <= 0.0)[0])
        raise ZeroRowSumException(f"Row {row} has no similarity to its neighbors")
    kernel = np.zeros((size, size), dtype=np.float64)
    kernel[rows, neighbors] = picked / (2.0 * sums[:, None])
    np.fill_diagonal(kernel, 0.5)
    return SimilarityMatrix(kernel, SimilarityKind.S)


def snf_fuse(views: Sequence[DissimilarityMatrix], config: Optional[SnfConfig] = None) -> SimilarityMatrix:
    """Fuse m >= 2 distance matrices with SNF.

    One step updates P^1, ..., P^m in ascending order with
    P^l = S^l (sum_{k != l} P^k / (m-1)) (S^l)^T, each update seeing the
    already updated lower indices (all from the previous step when
    config.synchronous). The output is the average of the P^l.

    Parameters:
    views (Sequence[DissimilarityMatrix]): D^1, ..., D^m.
    config (Optional[SnfConfig]): Constants, defaults to SnfConfig().

    Returns:
    SimilarityMatrix: kind fused.
    """

    if config is None:
        config = SnfConfig()
    if len(views) < 2:
        raise TooFewViewsException(f"SNF needs at least two views, got {len(views)}")
    sizes = {view.size for view in views}
    if len(sizes) != 1:
        raise SizeMismatchException(f"Views have different sizes {sorted(sizes)}")

    count = len(views)
    kernels_p: List[NDArray[np.float64]] = []
    kernels_s: List[NDArray[np.float64]] = []
    for view in views:
        weights = to_similarity(view, config.beta, config.kappa)
        kernels_p.append(np.array(full_kernel(weights).values))
        kernels_s.append(np.array(sparse_kernel(weights, config.kappa, view).values))
    logger.debug("SNF over %d views of size %d, %d iterations", count, views[0].size, config.iterations)

    for _ in range(config.iterations):
        previous = [kernel.copy() for kernel in kernels_p] if config.synchronous else kernels_p
        for index in range(count):
            others = np.sum([previous[k] for k in range(count) if k != index], axis=0) / (count - 1)
            updated = kernels_s[index] @ others @ kernels_s[index].T
            if config.symmetrize_each_step:
                updated = (updated + updated.T) / 2.0
            kernels_p[index] = updated

    fused = np.sum(kernels_p, axis=0) / count
    # products of non-negative matrices, clip rounding noise only
    return SimilarityMatrix(np.maximum(fused, 0.0), SimilarityKind.FUSED)


def similarity_view(distances: DissimilarityMatrix, config: Optional[SnfConfig] = None) -> SimilarityMatrix:
    """full_kernel(to_similarity(D)): a distance matrix seen the way SNF output is compared."""

    if config is None:
        config = SnfConfig()
    return full_kernel(to_similarity(distances, config.beta, config.kappa))
