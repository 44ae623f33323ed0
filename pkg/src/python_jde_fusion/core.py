"""Module with the shared domain types

Exposes the types:
- Channel, MultiTimeSeries
- DissimilarityMatrix, SimilarityMatrix
- DelayParams

and the functions:
- validate_dissimilarity()
- channel_distance()
- make_rng()
- read_matrix_csv(), write_matrix_csv()
- read_channels_csv(), write_channels_csv()
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from .error import (
    AsymmetryTooLargeException,
    DimensionMismatchException,
    EmptyInputException,
    IndexOutOfRangeException,
    NegativeEntryException,
    NonSquareException,
    NonzeroDiagonalException,
)
from .lib import (
    DIAGONAL_TOLERANCE,
    ROW_SUM_TOLERANCE,
    SYMMETRY_TOLERANCE,
    Boundary,
    ProjectionScope,
    SimilarityKind,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Largest seed accepted by make_rng()
MAX_SEED = 2**64 - 1


def _readonly(values: NDArray[np.float64]) -> NDArray[np.float64]:
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class Channel:
    """One sensor: T samples, each a point in k-dimensional real space."""

    samples: NDArray[np.float64]
    name: str = ""

    def __post_init__(self) -> None:
        if ":" in self.name:
            raise ValueError(f"Channel name {self.name!r} must not contain ':'")
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise DimensionMismatchException(f"Channel {self.name!r} samples must be T x k with k >= 1")
        if samples.shape[0] < 1:
            raise EmptyInputException(f"Channel {self.name!r} has no samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError(f"Channel {self.name!r} has non-finite samples")
        object.__setattr__(self, "samples", _readonly(samples))

    @property
    def dim(self) -> int:
        """k, the dimension of every sample."""
        return int(self.samples.shape[1])

    @property
    def length(self) -> int:
        """T, the number of samples."""
        return int(self.samples.shape[0])


@dataclass(frozen=True)
class MultiTimeSeries:
    """m channels sharing one sample count T."""

    channels: Tuple[Channel, ...]

    def __post_init__(self) -> None:
        channels = tuple(self.channels)
        if len(channels) == 0:
            raise EmptyInputException("A multi time series needs at least one channel")
        lengths = {channel.length for channel in channels}
        if len(lengths) != 1:
            raise DimensionMismatchException(f"Channels have different sample counts {sorted(lengths)}")
        object.__setattr__(self, "channels", channels)

    @classmethod
    def from_scalars(cls, series: Sequence[ArrayLike], names: Optional[Sequence[str]] = None) -> "MultiTimeSeries":
        """Build a series of scalar channels.

        Parameters:
        series (Sequence[ArrayLike]): One 1-D array per channel.
        names (Optional[Sequence[str]]): Channel names, defaults to ch0, ch1, ...

        Returns:
        MultiTimeSeries
        """

        if names is None:
            names = [f"ch{index}" for index in range(len(series))]
        if len(names) != len(series):
            raise DimensionMismatchException("One name per channel is required")
        channels = [
            Channel(np.asarray(values, dtype=np.float64).reshape(-1), name) for values, name in zip(series, names)
        ]
        return cls(tuple(channels))

    @property
    def n_channels(self) -> int:
        """m"""
        return len(self.channels)

    @property
    def length(self) -> int:
        """T"""
        return self.channels[0].length

    @property
    def names(self) -> List[str]:
        """Channel names, in channel order."""
        return [channel.name for channel in self.channels]


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric, non-negative, zero-diagonal N x N matrix.

    Build it with validate_dissimilarity().
    """

    values: NDArray[np.float64]

    @property
    def size(self) -> int:
        """N"""
        return int(self.values.shape[0])


@dataclass(frozen=True)
class SimilarityMatrix:
    """N x N non-negative matrix, tagged with its role in SNF."""

    values: NDArray[np.float64]
    kind: SimilarityKind

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise NonSquareException("Similarity matrix must be square")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("Similarity entries must be finite and non-negative")
        if self.kind == SimilarityKind.W:
            if not np.allclose(np.diag(values), 1.0, rtol=0.0, atol=1e-12):
                raise ValueError("W similarity must have a unit diagonal")
            if not np.allclose(values, values.T, rtol=SYMMETRY_TOLERANCE, atol=0.0):
                raise ValueError("W similarity must be symmetric")
        if self.kind == SimilarityKind.P:
            if not np.allclose(values.sum(axis=1), 1.0, rtol=0.0, atol=ROW_SUM_TOLERANCE):
                raise ValueError("P similarity rows must sum to 1")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def size(self) -> int:
        """N"""
        return int(self.values.shape[0])


@dataclass(frozen=True)
class DelayParams:
    """Delay tau (samples), window length d, orthogonality lam, boundary and projection scope."""

    tau: int = 1
    d: int = 1
    lam: float = 0.0
    boundary: Boundary = Boundary.TRUNCATE
    scope: ProjectionScope = field(default=ProjectionScope.UNMARKED_ONLY)

    def __post_init__(self) -> None:
        if int(self.tau) != self.tau or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")


def validate_dissimilarity(matrix: ArrayLike) -> DissimilarityMatrix:
    """Validate a dissimilarity matrix.

    Asymmetry up to 1e-12 (relative to the largest entry) is removed by averaging
    the matrix with its transpose, a diagonal below 1e-12 relative is set to 0.

    Parameters:
    matrix (ArrayLike): N x N real matrix.

    Returns:
    DissimilarityMatrix
    """

    values = np.array(matrix, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise NonSquareException(f"Expected a square matrix, got shape {values.shape}")
    if values.shape[0] == 0:
        raise EmptyInputException("Matrix has no rows")
    if not np.all(np.isfinite(values)):
        raise ValueError("Matrix has non-finite entries")
    if np.any(values < 0):
        raise NegativeEntryException()

    scale = float(np.max(values))
    if np.any(np.abs(np.diag(values)) > DIAGONAL_TOLERANCE * scale):
        raise NonzeroDiagonalException()
    if float(np.max(np.abs(values - values.T))) > SYMMETRY_TOLERANCE * scale:
        raise AsymmetryTooLargeException()

    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(_readonly(values))


def channel_distance(ts: MultiTimeSeries, i: int, t1: int, t2: int) -> float:
    """Euclidean distance between samples t1 and t2 of channel i.

    Parameters:
    ts (MultiTimeSeries): The series.
    i (int): Channel index.
    t1 (int): First sample index.
    t2 (int): Second sample index.

    Returns:
    float
    """

    if not 0 <= i < ts.n_channels:
        raise IndexOutOfRangeException(f"Channel index {i} outside [0, {ts.n_channels})")
    for t in (t1, t2):
        if not 0 <= t < ts.length:
            raise IndexOutOfRangeException(f"Sample index {t} outside [0, {ts.length})")
    samples = ts.channels[i].samples
    return float(np.linalg.norm(samples[t1] - samples[t2]))


def make_rng(seed: int) -> np.random.Generator:
    """The generator used for every random draw: numpy PCG64 seeded with a 64-bit unsigned seed."""

    if int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed must be an integer in [0, 2^64), got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def write_matrix_csv(path: PathLike, matrix: ArrayLike) -> None:
    """Write a matrix as header-less CSV with 17 significant digits and LF line endings."""

    values = np.asarray(matrix, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    np.savetxt(path, values, fmt="%.17g", delimiter=",", newline="\n")
    logger.debug("Wrote %s matrix to %s", values.shape, path)


def read_matrix_csv(path: PathLike) -> NDArray[np.float64]:
    """Read a header-less matrix CSV."""

    values: NDArray[np.float64] = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    logger.debug("Read %s matrix from %s", values.shape, path)
    return values


def write_channels_csv(path: PathLike, ts: MultiTimeSeries) -> None:
    """Write a series as T rows, one column per scalar component, with a header row.

    Vector channels are spread over columns named ``name:0``, ``name:1``, ...
    Unnamed channels are written as ``ch<index>``.
    """

    names = [channel.name or f"ch{index}" for index, channel in enumerate(ts.channels)]
    if len(set(names)) != len(names):
        raise ValueError(f"Channel names must be unique to be written, got {names}")
    header: List[str] = []
    for name, channel in zip(names, ts.channels):
        if channel.dim == 1:
            header.append(name)
        else:
            header.extend(f"{name}:{component}" for component in range(channel.dim))
    values = np.hstack([channel.samples for channel in ts.channels])
    np.savetxt(path, values, fmt="%.17g", delimiter=",", newline="\n", header=",".join(header), comments="")


def read_channels_csv(path: PathLike) -> MultiTimeSeries:
    """Read a channels CSV written by write_channels_csv()."""

    frame = pd.read_csv(path, dtype=np.float64, float_precision="round_trip")
    groups: List[Tuple[str, List[str]]] = []
    for column in frame.columns:
        name = str(column).split(":", 1)[0]
        if groups and groups[-1][0] == name and ":" in str(column):
            groups[-1][1].append(str(column))
        else:
            groups.append((name, [str(column)]))
    channels = tuple(Channel(frame[columns].to_numpy(dtype=np.float64), name) for name, columns in groups)
    return MultiTimeSeries(channels)
