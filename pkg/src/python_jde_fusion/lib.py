"""Module which have common functions and constants"""

import os
from enum import Enum
from typing import List, Tuple, Type, TypeVar

DEBUG = os.environ.get("JDE_FUSION_DEBUG", "false") in ("true", "TRUE")

# Relative tolerance for the symmetry of a dissimilarity matrix
SYMMETRY_TOLERANCE = 1e-12
# Relative tolerance (against the largest entry) for a zero diagonal
DIAGONAL_TOLERANCE = 1e-12
# Row sums of the SNF kernels
ROW_SUM_TOLERANCE = 1e-9
# Unit norm of a projection sensor
UNIT_NORM_TOLERANCE = 1e-12

# Defaults used by the synthetic experiments
DEFAULT_BETA = 0.5
DEFAULT_KAPPA = 0.1
DEFAULT_ITERATIONS = 20

DEFAULT_MAX_ROWS = 200
DEFAULT_SIMPLEX_BUDGET = 5_000_000
DEFAULT_CHUNK_SIZE = 4096

# The DeviceMotion modalities, in the order they become channels
MOTIONSENSE_MODALITIES: List[str] = [
    "attitude.roll",
    "attitude.pitch",
    "attitude.yaw",
    "gravity.x",
    "gravity.y",
    "gravity.z",
    "rotationRate.x",
    "rotationRate.y",
    "rotationRate.z",
    "userAcceleration.x",
    "userAcceleration.y",
    "userAcceleration.z",
]

# (d, lambda) grid of the JDE variants compared in the synthetic experiments
SYNTHETIC_JDE_GRID: List[Tuple[int, float]] = [(10, 0.0), (10, 1.0), (20, 0.0), (20, 1.0)]


class Boundary(Enum):
    """How a window is read near the end of the series."""

    TRUNCATE = "truncate"  # doc: only windows fully inside the series
    WRAP = "wrap"  # doc: indices taken modulo the series length


class ProjectionScope(Enum):
    """Which vectors are projected in each Gram-Schmidt tensor step."""

    UNMARKED_ONLY = "unmarked_only"  # doc: only the not yet marked vectors
    ALL_VECTORS = "all_vectors"  # doc: every vector other than the marked one


class SimilarityKind(Enum):
    """The role of a similarity matrix in SNF."""

    W = "W"
    P = "P"
    S = "S"
    FUSED = "fused"


class FusionMethod(Enum):
    """Fusion methods which produce a single matrix from many channels."""

    JDE = "jde"
    JDL = "jdl"
    SNF = "snf"


class MatrixKind(Enum):
    """Whether a matrix file holds distances or similarities."""

    DISTANCE = "distance"
    SIMILARITY = "similarity"


class SensorKind(Enum):
    """Observation functions of the synthetic experiments."""

    PROJECTION = "projection"
    BASEPOINT = "basepoint"


class CorrelationMethod(Enum):
    """Correlation used to compare off-diagonal entries."""

    PEARSON = "pearson"
    SPEARMAN = "spearman"


EnumT = TypeVar("EnumT", bound=Enum)


def _enum_value(enum_type: Type[EnumT], value: str) -> EnumT:
    for member in enum_type:
        if member.value == value:
            return member
    raise ValueError(f"{value} is not a supported {enum_type.__name__.lower()}.")


def get_boundary_enum(value: str) -> Boundary:
    """Returns the correct enum for the given boundary mode.

    :param value: boundary mode as string.

    :returns: Boundary
    :raises: ValueError if unknown boundary mode.
    """
    return _enum_value(Boundary, value)


def get_scope_enum(value: str) -> ProjectionScope:
    """Returns the correct enum for the given projection scope.

    :param value: projection scope as string.

    :returns: ProjectionScope
    :raises: ValueError if unknown scope.
    """
    return _enum_value(ProjectionScope, value)


def get_method_enum(value: str) -> FusionMethod:
    """Returns the correct enum for the given fusion method.

    :param value: fusion method as string.

    :returns: FusionMethod
    :raises: ValueError if unknown method.
    """
    return _enum_value(FusionMethod, value)


def get_matrix_kind_enum(value: str) -> MatrixKind:
    """Returns the correct enum for the given matrix kind.

    :param value: "distance" or "similarity".

    :returns: MatrixKind
    :raises: ValueError if unknown kind.
    """
    return _enum_value(MatrixKind, value)


def get_correlation_enum(value: str) -> CorrelationMethod:
    """Returns the correct enum for the given correlation method.

    :param value: "pearson" or "spearman".

    :returns: CorrelationMethod
    :raises: ValueError if unknown method.
    """
    return _enum_value(CorrelationMethod, value)


def env_workers() -> int:
    """Worker pool size, from JDE_FUSION_WORKERS (default 1 means no pool)."""

    value = os.environ.get("JDE_FUSION_WORKERS", "1")
    try:
        workers = int(value)
    except ValueError as exc:
        raise ValueError(f"JDE_FUSION_WORKERS must be an integer, got {value}") from exc
    return max(1, workers)


def env_simplex_budget() -> int:
    """Simplex cap for Rips filtrations, from JDE_FUSION_SIMPLEX_BUDGET."""

    value = os.environ.get("JDE_FUSION_SIMPLEX_BUDGET", str(DEFAULT_SIMPLEX_BUDGET))
    try:
        return int(value)
    except ValueError as exc:
        raise ValueError(f"JDE_FUSION_SIMPLEX_BUDGET must be an integer, got {value}") from exc
