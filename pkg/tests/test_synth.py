"""
Test the synthetic torus experiments
"""

import unittest

import numpy as np
from scipy.spatial.distance import pdist, squareform

from src.python_jde_fusion.core import make_rng
from src.python_jde_fusion.error import NonUnitProjectionException
from src.python_jde_fusion.lib import SensorKind
from src.python_jde_fusion.snf import SnfConfig
from src.python_jde_fusion.synth import (
    Sensor,
    TorusCurveParams,
    apply_sensor,
    curve_point,
    ground_truth_matrix,
    ground_truth_similarity,
    make_experiment,
    torus_curve,
)


class TestTorusCurve(unittest.TestCase):
    """
    Test torus_curve() and ground_truth_matrix().
    """

    def test_known_points(self) -> None:
        """
        t = 0 and t = pi / 2 with the default radii.
        """

        points = torus_curve(TorusCurveParams())
        self.assertTrue(points.shape == (100, 3))
        self.assertTrue(np.allclose(points[0], [7.0, 0.0, 0.0], rtol=0.0, atol=1e-12))
        self.assertTrue(np.allclose(points[25], [-5.0, 0.0, 2.0], rtol=0.0, atol=1e-12))

    def test_on_torus(self) -> None:
        """
        Every point satisfies (sqrt(x^2 + y^2) - R)^2 + z^2 = r^2.
        """

        for params in (TorusCurveParams(), TorusCurveParams(R=4.0, r=1.5, a=3, b=5, x0=0.3, y0=-1.1, N=77)):
            points = torus_curve(params)
            ring = np.sqrt(points[:, 0] ** 2 + points[:, 1] ** 2) - params.R
            self.assertTrue(np.allclose(ring**2 + points[:, 2] ** 2, params.r**2, rtol=0.0, atol=1e-12))

    def test_closed(self) -> None:
        """
        The curve returns to its start at t = 2 pi.
        """

        for params in (TorusCurveParams(), TorusCurveParams(R=4.0, r=1.5, a=3, b=5, x0=0.3, y0=-1.1)):
            ends = curve_point(params, [0.0, 2.0 * np.pi])
            self.assertTrue(np.allclose(ends[0], ends[1], rtol=0.0, atol=1e-12))

    def test_ground_truth(self) -> None:
        """
        A valid dissimilarity matrix bounded by the torus diameter.
        """

        truth = ground_truth_matrix(torus_curve(TorusCurveParams()))
        self.assertTrue(truth.size == 100)
        self.assertTrue(float(np.max(truth.values)) <= 14.0 + 1e-12)
        self.assertTrue(np.all(np.diag(truth.values) == 0.0))
        similarity = ground_truth_similarity(torus_curve(TorusCurveParams(N=20)), SnfConfig(kappa=0.2))
        self.assertTrue(np.allclose(similarity.values.sum(axis=1), 1.0, rtol=0.0, atol=1e-12))

    def test_invalid_params(self) -> None:
        """
        R must exceed r and N must be at least 3.
        """

        with self.assertRaises(ValueError):
            TorusCurveParams(R=2.0, r=2.0)
        with self.assertRaises(ValueError):
            TorusCurveParams(N=2)


class TestSensors(unittest.TestCase):
    """
    Test Sensor and apply_sensor().
    """

    def test_projection(self) -> None:
        """
        Projections onto the axes.
        """

        params = TorusCurveParams()
        points = torus_curve(params)
        along_x = apply_sensor(points, Sensor(SensorKind.PROJECTION, (1.0, 0.0, 0.0)))
        self.assertTrue(abs(along_x[0] - 7.0) < 1e-12)
        along_z = apply_sensor(points, Sensor(SensorKind.PROJECTION, (0.0, 0.0, 1.0)))
        angles = 2.0 * np.pi * np.arange(params.N) / params.N
        self.assertTrue(np.allclose(along_z, 2.0 * np.sin(angles), rtol=0.0, atol=1e-12))

    def test_basepoint(self) -> None:
        """
        A basepoint on the curve is at distance zero from its own sample.
        """

        points = torus_curve(TorusCurveParams())
        base = (float(points[5, 0]), float(points[5, 1]), float(points[5, 2]))
        distances = apply_sensor(points, Sensor(SensorKind.BASEPOINT, base))
        self.assertTrue(distances[5] == 0.0)
        self.assertTrue(np.all(distances >= 0.0))

    def test_lipschitz(self) -> None:
        """
        Sensor readings never differ by more than the distance of the points.
        """

        rng = make_rng(40)
        points = rng.uniform(-7.0, 7.0, size=(60, 3))
        distances = squareform(pdist(points))
        for _ in range(10):
            direction = rng.standard_normal(3)
            direction /= np.linalg.norm(direction)
            base = rng.uniform(-2.5, 2.5, size=3)
            for sensor in (
                Sensor(SensorKind.PROJECTION, (float(direction[0]), float(direction[1]), float(direction[2]))),
                Sensor(SensorKind.BASEPOINT, (float(base[0]), float(base[1]), float(base[2]))),
            ):
                readings = apply_sensor(points, sensor)
                gaps = np.abs(readings[:, None] - readings[None, :])
                self.assertTrue(np.all(gaps <= distances + 1e-12))

    def test_non_unit(self) -> None:
        """
        Projection vectors must have unit norm, basepoints need not.
        """

        with self.assertRaises(NonUnitProjectionException):
            Sensor(SensorKind.PROJECTION, (1.0, 1.0, 0.0))
        Sensor(SensorKind.BASEPOINT, (1.0, 1.0, 0.0))


class TestExperiments(unittest.TestCase):
    """
    Test make_experiment().
    """

    def test_kinds(self) -> None:
        """
        Channel counts and sensor kinds of the three experiments.
        """

        first = make_experiment(1, 0)
        self.assertTrue(first.series.n_channels == 3 and first.series.length == 100)
        self.assertTrue(all(sensor.kind == SensorKind.PROJECTION for sensor in first.sensors))
        for sensor in first.sensors:
            self.assertTrue(abs(float(np.linalg.norm(sensor.vector)) - 1.0) < 1e-12)

        second = make_experiment(2, 0)
        self.assertTrue(second.series.n_channels == 3)
        for sensor in second.sensors:
            self.assertTrue(sensor.kind == SensorKind.BASEPOINT)
            self.assertTrue(all(-2.5 <= value <= 2.5 for value in sensor.vector))

        third = make_experiment(3, 0)
        kinds = [sensor.kind for sensor in third.sensors]
        self.assertTrue(kinds == [SensorKind.PROJECTION] * 2 + [SensorKind.BASEPOINT] * 2)
        self.assertTrue(third.series.n_channels == 4)

        with self.assertRaises(ValueError):
            make_experiment(4, 0)

    def test_seeded(self) -> None:
        """
        Equal seeds give equal series, different seeds different ones.
        """

        first = make_experiment(3, 11)
        again = make_experiment(3, 11)
        other = make_experiment(3, 12)
        for channel, repeat in zip(first.series.channels, again.series.channels):
            self.assertTrue(np.array_equal(channel.samples, repeat.samples))
        self.assertFalse(np.array_equal(first.series.channels[0].samples, other.series.channels[0].samples))
        self.assertTrue(np.array_equal(first.truth.values, other.truth.values))

    def test_custom_curve(self) -> None:
        """
        The number of samples follows the curve parameters.
        """

        experiment = make_experiment(1, 5, TorusCurveParams(N=40))
        self.assertTrue(experiment.series.length == 40)
        self.assertTrue(experiment.truth.size == 40)
        self.assertTrue(experiment.points.shape == (40, 3))


if __name__ == "__main__":
    unittest.main()
