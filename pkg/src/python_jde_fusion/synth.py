"""Module which generates the synthetic torus curve experiments

Exposes the functions:
- torus_curve()
- ground_truth_matrix()
- ground_truth_similarity()
- apply_sensor()
- make_experiment()
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist, squareform

from .core import DissimilarityMatrix, MultiTimeSeries, SimilarityMatrix, make_rng, validate_dissimilarity
from .error import NonUnitProjectionException
from .lib import UNIT_NORM_TOLERANCE, SensorKind
from .snf import SnfConfig, similarity_view

logger = logging.getLogger(__name__)

# Half width of the box the basepoints are drawn from
BASEPOINT_BOX = 2.5


@dataclass(frozen=True)
class TorusCurveParams:
    """Curve on a torus with outer radius R and inner radius r, winding a / b times."""

    R: float = 5.0  # pylint: disable=invalid-name
    r: float = 2.0
    a: int = 1
    b: int = 2
    x0: float = 0.0
    y0: float = 0.0
    N: int = 100  # pylint: disable=invalid-name

    def __post_init__(self) -> None:
        if not self.R > self.r > 0.0:
            raise ValueError(f"Radii must satisfy R > r > 0, got R={self.R}, r={self.r}")
        if self.N < 3:
            raise ValueError(f"At least 3 samples are required, got {self.N}")


@dataclass(frozen=True)
class Sensor:
    """An observation function of a point in 3-space."""

    kind: SensorKind
    vector: Tuple[float, float, float]

    def __post_init__(self) -> None:
        if self.kind == SensorKind.PROJECTION:
            norm = float(np.linalg.norm(self.vector))
            if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
                raise NonUnitProjectionException(f"Projection vector has norm {norm}")

    def to_dict(self) -> Dict[str, Any]:
        """JSON friendly form, for manifests."""
        return {"kind": self.kind.value, "vector": [float(value) for value in self.vector]}


@dataclass(frozen=True)
class Experiment:
    """Inputs and ground truth of one synthetic experiment."""

    kind: int
    seed: int
    series: MultiTimeSeries
    truth: DissimilarityMatrix
    points: NDArray[np.float64]
    sensors: List[Sensor] = field(default_factory=list)
    curve: TorusCurveParams = field(default_factory=TorusCurveParams)


def curve_point(params: TorusCurveParams, t: ArrayLike) -> NDArray[np.float64]:
    """The curve evaluated at parameter values t, one row per value."""

    angles = np.asarray(t, dtype=np.float64)
    radius = params.R + params.r * np.cos(params.a * angles + params.x0)
    return np.stack(
        [
            radius * np.cos(params.b * angles + params.y0),
            radius * np.sin(params.b * angles + params.y0),
            params.r * np.sin(params.a * angles + params.x0),
        ],
        axis=-1,
    )


def torus_curve(params: TorusCurveParams) -> NDArray[np.float64]:
    """N points evenly spaced in the parameter, t_n = 2 pi n / N."""

    return curve_point(params, 2.0 * np.pi * np.arange(params.N) / params.N)


def ground_truth_matrix(points: ArrayLike) -> DissimilarityMatrix:
    """Pairwise Euclidean distances between points."""

    values = np.asarray(points, dtype=np.float64)
    if values.shape[0] == 1:
        return validate_dissimilarity(np.zeros((1, 1)))
    return validate_dissimilarity(squareform(pdist(values, metric="euclidean")))


def ground_truth_similarity(points: ArrayLike, config: SnfConfig) -> SimilarityMatrix:
    """The ground truth seen as SNF sees similarities."""

    return similarity_view(ground_truth_matrix(points), config)


def apply_sensor(points: ArrayLike, sensor: Sensor) -> NDArray[np.float64]:
    """Scalar time series of a sensor along the points."""

    values = np.asarray(points, dtype=np.float64)
    vector = np.asarray(sensor.vector, dtype=np.float64)
    if sensor.kind == SensorKind.PROJECTION:
        if abs(float(np.linalg.norm(vector)) - 1.0) > UNIT_NORM_TOLERANCE:
            raise NonUnitProjectionException()
        series: NDArray[np.float64] = values @ vector
        return series
    distances: NDArray[np.float64] = np.linalg.norm(values - vector[None, :], axis=1)
    return distances


def _sphere_sensor(rng: np.random.Generator) -> Sensor:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return Sensor(SensorKind.PROJECTION, (float(direction[0]), float(direction[1]), float(direction[2])))


def _box_sensor(rng: np.random.Generator) -> Sensor:
    point = rng.uniform(-BASEPOINT_BOX, BASEPOINT_BOX, size=3)
    return Sensor(SensorKind.BASEPOINT, (float(point[0]), float(point[1]), float(point[2])))


def make_experiment(kind: int, seed: int, params: TorusCurveParams = TorusCurveParams()) -> Experiment:
    """Draw the sensors of a synthetic experiment.

    kind 1: three projections onto random unit vectors
    kind 2: three distances to random points of [-2.5, 2.5]^3
    kind 3: two projections then two basepoint distances

    Parameters:
    kind (int): 1, 2 or 3.
    seed (int): Seed of the generator.
    params (TorusCurveParams): The curve, R=5, r=2, a=1, b=2, N=100 by default.

    Returns:
    Experiment
    """

    rng = make_rng(seed)
    if kind == 1:
        sensors = [_sphere_sensor(rng) for _ in range(3)]
    elif kind == 2:
        sensors = [_box_sensor(rng) for _ in range(3)]
    elif kind == 3:
        sensors = [_sphere_sensor(rng) for _ in range(2)] + [_box_sensor(rng) for _ in range(2)]
    else:
        raise ValueError(f"Experiment kind must be 1, 2 or 3, got {kind}")

    points = torus_curve(params)
    series = MultiTimeSeries.from_scalars(
        [apply_sensor(points, sensor) for sensor in sensors],
        [f"{sensor.kind.value}{index}" for index, sensor in enumerate(sensors)],
    )
    logger.debug("Experiment %d with seed %d: %d sensors over %d points", kind, seed, len(sensors), params.N)
    return Experiment(kind, seed, series, ground_truth_matrix(points), points, sensors, params)
