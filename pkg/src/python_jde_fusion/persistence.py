"""Module with Vietoris-Rips persistence diagrams

Exposes the functions:
- rips_persistence()
- diagram_summary()
- read_diagram_csv(), write_diagram_csv()

Dimension 0 comes from a union-find over the edges in filtration order. Higher
dimensions come from the standard column reduction of the boundary matrices over
the two element field, the top dimension first so that its pivots clear columns
of the next one.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from .core import DissimilarityMatrix, PathLike
from .error import BudgetExceededException, ThresholdRequiredException
from .lib import env_simplex_budget

logger = logging.getLogger(__name__)

ENCLOSING = "enclosing"


@dataclass(frozen=True)
class PersistencePoint:
    """A class of dimension dim, born at birth and dying at death (math.inf if never)."""

    dim: int
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        """death - birth"""
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """Points of a Rips filtration up to a threshold."""

    points: Tuple[PersistencePoint, ...]
    threshold: float
    max_dim: int

    def in_dim(self, dim: int) -> List[PersistencePoint]:
        """Points of one dimension, in diagram order."""
        return [point for point in self.points if point.dim == dim]


class _UnionFind:
    """Union-Find with path compression"""

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, item: int) -> int:
        """Root of the set containing item."""
        root = item
        while root != self.parent[root]:
            self.parent[root] = self.parent[self.parent[root]]
            root = self.parent[root]
        return root

    def union(self, first: int, second: int) -> bool:
        """Join the sets of first and second, False if they already were one."""
        root_a, root_b = self.find(first), self.find(second)
        if root_a == root_b:
            return False
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] += 1
        return True


@dataclass
class _Filtration:
    """Simplices of one dimension in filtration order."""

    vertices: NDArray[np.int64]
    values: NDArray[np.float64]

    @property
    def count(self) -> int:
        return int(self.values.size)


def _ordered(vertices: NDArray[np.int64], values: NDArray[np.float64]) -> _Filtration:
    # value first, then the vertex tuple lexicographically
    keys = [vertices[:, column] for column in reversed(range(vertices.shape[1]))] + [values]
    order = np.lexsort(keys)
    return _Filtration(vertices[order], values[order])


def _edges(values: NDArray[np.float64], limit: float) -> _Filtration:
    first, second = np.triu_indices(values.shape[0], k=1)
    weights = values[first, second]
    keep = weights <= limit
    return _ordered(np.stack([first[keep], second[keep]], axis=1).astype(np.int64), weights[keep])


def _triangles(values: NDArray[np.float64], limit: float, budget: int) -> _Filtration:
    size = values.shape[0]
    chunks: List[NDArray[np.int64]] = []
    weights: List[NDArray[np.float64]] = []
    total = 0
    for i in range(size):
        neighbors = np.flatnonzero(values[i, i + 1 :] <= limit) + i + 1
        if neighbors.size < 2:
            continue
        left, right = np.triu_indices(neighbors.size, k=1)
        j, k = neighbors[left], neighbors[right]
        heights = np.maximum(np.maximum(values[i, j], values[i, k]), values[j, k])
        keep = heights <= limit
        total += int(np.count_nonzero(keep))
        if total > budget:
            raise BudgetExceededException(f"More than {budget} simplices below {limit}")
        chunks.append(np.stack([np.full(int(keep.sum()), i), j[keep], k[keep]], axis=1).astype(np.int64))
        weights.append(heights[keep])
    if not chunks:
        return _Filtration(np.zeros((0, 3), dtype=np.int64), np.zeros(0))
    return _ordered(np.concatenate(chunks), np.concatenate(weights))


def _tetrahedra(values: NDArray[np.float64], edges: _Filtration, limit: float, budget: int) -> _Filtration:
    chunks: List[NDArray[np.int64]] = []
    weights: List[NDArray[np.float64]] = []
    total = 0
    for (i, j), height in zip(edges.vertices, edges.values):
        later = np.arange(j + 1, values.shape[0])
        common = later[(values[i, later] <= limit) & (values[j, later] <= limit)]
        if common.size < 2:
            continue
        left, right = np.triu_indices(common.size, k=1)
        k, l = common[left], common[right]
        heights = np.maximum.reduce(
            [np.full(k.size, height), values[i, k], values[i, l], values[j, k], values[j, l], values[k, l]]
        )
        keep = heights <= limit
        total += int(np.count_nonzero(keep))
        if total > budget:
            raise BudgetExceededException(f"More than {budget} simplices below {limit}")
        count = int(keep.sum())
        chunks.append(np.stack([np.full(count, i), np.full(count, j), k[keep], l[keep]], axis=1).astype(np.int64))
        weights.append(heights[keep])
    if not chunks:
        return _Filtration(np.zeros((0, 4), dtype=np.int64), np.zeros(0))
    return _ordered(np.concatenate(chunks), np.concatenate(weights))


def _simplex_keys(vertices: NDArray[np.int64], size: int) -> NDArray[np.int64]:
    keys = np.zeros(vertices.shape[0], dtype=np.int64)
    for column in range(vertices.shape[1]):
        keys = keys * size + vertices[:, column]
    return keys


def _boundary_ranks(faces: _Filtration, cofaces: _Filtration, size: int) -> NDArray[np.int64]:
    """For every coface, the filtration ranks of its faces."""

    face_keys = _simplex_keys(faces.vertices, size)
    order = np.argsort(face_keys)
    sorted_keys = face_keys[order]
    width = cofaces.vertices.shape[1]
    ranks = np.zeros((cofaces.count, width), dtype=np.int64)
    for drop in range(width):
        kept = [column for column in range(width) if column != drop]
        keys = _simplex_keys(cofaces.vertices[:, kept], size)
        ranks[:, drop] = order[np.searchsorted(sorted_keys, keys)]
    return ranks


def _reduce(
    boundaries: NDArray[np.int64], cleared: Set[int], stop_after: Optional[int] = None
) -> Tuple[Dict[int, int], Set[int]]:
    """Column reduction over Z/2.

    Returns the pairs {pivot face rank: coface rank} and the cofaces whose column
    reduced to zero. Columns in cleared are skipped. With stop_after the loop ends
    once that many pairs are found; zero columns are then incomplete.
    """

    reduced: Dict[int, Set[int]] = {}
    pairs: Dict[int, int] = {}
    zero: Set[int] = set()
    for coface in range(boundaries.shape[0]):
        if coface in cleared:
            continue
        faces = boundaries[coface]
        low = int(faces.max())
        if low not in reduced:
            reduced[low] = {int(face) for face in faces}
            pairs[low] = coface
        else:
            column = {int(face) for face in faces}
            while column:
                low = max(column)
                owner = reduced.get(low)
                if owner is None:
                    break
                column ^= owner
            if column:
                reduced[low] = column
                pairs[low] = coface
            else:
                zero.add(coface)
                continue
        if stop_after is not None and len(pairs) >= stop_after:
            break
    return pairs, zero


def _enclosing_radius(values: NDArray[np.float64]) -> float:
    if values.shape[0] == 1:
        return 0.0
    return float(np.min(np.max(values, axis=1)))


def rips_persistence(
    distances: DissimilarityMatrix,
    max_dim: int = 1,
    threshold: Union[float, str] = ENCLOSING,
    budget: Optional[int] = None,
) -> PersistenceDiagram:
    """Persistence diagram of the Vietoris-Rips filtration of a dissimilarity matrix.

    A simplex enters at the largest distance between its vertices; ties are
    broken by dimension, then lexicographically by vertices. Points with
    birth == death are left out.

    Above the enclosing radius (smallest row maximum) the complex is a cone, so
    only simplices up to that radius are built for dimensions 1 and 2; the
    diagram is the same as with the full complex.

    Parameters:
    distances (DissimilarityMatrix): D.
    max_dim (int): 0, 1 or 2.
    threshold (Union[float, str]): Largest filtration value, or "enclosing" for the largest entry of D.
    budget (Optional[int]): Simplex cap, defaults to JDE_FUSION_SIMPLEX_BUDGET.

    Returns:
    PersistenceDiagram
    """

    if max_dim not in (0, 1, 2):
        raise ValueError(f"max_dim must be 0, 1 or 2, got {max_dim}")
    values = distances.values
    size = distances.size
    if threshold == ENCLOSING:
        if max_dim == 2:
            raise ThresholdRequiredException()
        limit = float(np.max(values))
    else:
        limit = float(threshold)
        if not math.isfinite(limit) or limit < 0.0:
            raise ValueError(f"Threshold must be a finite non-negative number, got {threshold}")
    if budget is None:
        budget = env_simplex_budget()

    points: List[PersistencePoint] = []

    edges = _edges(values, limit)
    if size + edges.count > budget:
        raise BudgetExceededException(f"{size + edges.count} simplices exceed the budget of {budget}")
    components = _UnionFind(size)
    negative_edges: Set[int] = set()
    for rank, ((first, second), height) in enumerate(zip(edges.vertices, edges.values)):
        if components.union(int(first), int(second)):
            negative_edges.add(rank)
            if height > 0.0:
                points.append(PersistencePoint(0, 0.0, float(height)))
    roots = {components.find(vertex) for vertex in range(size)}
    points.extend(PersistencePoint(0, 0.0, math.inf) for _ in roots)

    if max_dim >= 1 and size >= 3:
        build_limit = min(limit, _enclosing_radius(values))
        low_edges = int(np.searchsorted(edges.values, build_limit, side="right"))
        # edges are sorted by value, so the first low_edges of them are below build_limit
        edges_low = _Filtration(edges.vertices[:low_edges], edges.values[:low_edges])
        triangles = _triangles(values, build_limit, budget - size - edges.count)
        logger.debug(
            "Rips of %d points: %d edges, %d triangles below %g", size, edges_low.count, triangles.count, build_limit
        )
        triangle_faces = _boundary_ranks(edges_low, triangles, size)

        cleared: Set[int] = set()
        tetra_pairs: Dict[int, int] = {}
        if max_dim == 2:
            tetrahedra = _tetrahedra(values, edges_low, build_limit, budget - size - edges.count - triangles.count)
            logger.debug("%d tetrahedra below %g", tetrahedra.count, build_limit)
            if tetrahedra.count:
                tetra_pairs, _ = _reduce(_boundary_ranks(triangles, tetrahedra, size), set())
                for face, coface in tetra_pairs.items():
                    cleared.add(face)
                    birth, death = float(triangles.values[face]), float(tetrahedra.values[coface])
                    if death > birth:
                        points.append(PersistencePoint(2, birth, death))

        positive_edges = [rank for rank in range(edges_low.count) if rank not in negative_edges]
        # zero columns of the top reduction are not reported, so it may stop once every edge is paired
        stop_after = len(positive_edges) if max_dim == 1 else None
        if triangles.count:
            edge_pairs, zero = _reduce(triangle_faces, cleared, stop_after)
        else:
            edge_pairs, zero = {}, set()
        for face, coface in edge_pairs.items():
            birth, death = float(edges_low.values[face]), float(triangles.values[coface])
            if death > birth:
                points.append(PersistencePoint(1, birth, death))
        for rank in positive_edges:
            if rank not in edge_pairs:
                points.append(PersistencePoint(1, float(edges_low.values[rank]), math.inf))
        if max_dim == 2:
            for coface in sorted(zero):
                if coface not in tetra_pairs:
                    points.append(PersistencePoint(2, float(triangles.values[coface]), math.inf))

    points.sort(key=lambda point: (point.dim, point.birth, point.death))
    return PersistenceDiagram(tuple(points), limit, max_dim)


def diagram_summary(diagram: PersistenceDiagram) -> Dict[int, List[PersistencePoint]]:
    """Points per dimension, most persistent first (infinite before finite, stable)."""

    summary: Dict[int, List[PersistencePoint]] = {dim: [] for dim in range(diagram.max_dim + 1)}
    for point in diagram.points:
        summary.setdefault(point.dim, []).append(point)
    for dim, points in summary.items():
        summary[dim] = sorted(points, key=lambda point: -point.persistence)
    return summary


def write_diagram_csv(path: PathLike, diagram: PersistenceDiagram) -> None:
    """Write dim,birth,death rows; an infinite death is written as inf."""

    frame = pd.DataFrame(
        {
            "dim": [point.dim for point in diagram.points],
            "birth": [point.birth for point in diagram.points],
            "death": [point.death for point in diagram.points],
        },
        columns=["dim", "birth", "death"],
    )
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def read_diagram_csv(path: PathLike, max_dim: Optional[int] = None) -> PersistenceDiagram:
    """Read a diagram CSV written by write_diagram_csv()."""

    frame = pd.read_csv(
        path, dtype={"dim": np.int64, "birth": np.float64, "death": np.float64}, float_precision="round_trip"
    )
    points = tuple(
        PersistencePoint(int(dim), float(birth), float(death))
        for dim, birth, death in zip(frame["dim"], frame["birth"], frame["death"])
    )
    if max_dim is None:
        max_dim = max((point.dim for point in points), default=0)
    finite = [point.death for point in points if math.isfinite(point.death)]
    return PersistenceDiagram(points, max(finite, default=0.0), max_dim)
