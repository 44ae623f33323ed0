"""
Test the Gram-Schmidt tensor, JDE and JDL
"""

import math
import os
import sys
import unittest
from typing import List

import numpy as np

from src.python_jde_fusion.core import DelayParams, MultiTimeSeries, make_rng
from src.python_jde_fusion.error import DimensionMismatchException, EmptyInputException, SizeMismatchException
from src.python_jde_fusion.lib import Boundary, ProjectionScope
from src.python_jde_fusion.orthofuse import (
    gs_tensor,
    gs_tensor_batch,
    gs_trace,
    jde_distance,
    jde_matrix,
    jdl_matrix,
    sensor_matrices,
)


def literal_gs(vectors: List[List[float]], lam: float, all_vectors: bool) -> float:
    """The Gram-Schmidt tensor step by step with plain Python lists."""

    work = [list(map(float, vector)) for vector in vectors]
    marked = [False] * len(work)
    floor = len(work) * sys.float_info.epsilon * max(sum(x * x for x in vector) for vector in work)
    for _ in range(len(work)):
        norms = [sum(x * x for x in vector) for vector in work]
        star = -1
        for index, norm in enumerate(norms):
            if not marked[index] and (star < 0 or norm > norms[star]):
                star = index
        marked[star] = True
        pivot = list(work[star])
        square = sum(x * x for x in pivot)
        if square <= floor:
            continue
        for index, vector in enumerate(work):
            if index == star or (marked[index] and not all_vectors):
                continue
            coefficient = lam * sum(a * b for a, b in zip(vector, pivot)) / square
            work[index] = [a - coefficient * b for a, b in zip(vector, pivot)]
    return math.sqrt(sum(x * x for vector in work for x in vector))


class TestGramSchmidtTensor(unittest.TestCase):
    """
    Test gs_tensor(), gs_trace() and gs_tensor_batch().
    """

    def test_worked_examples(self) -> None:
        """
        Hand-executed examples of both scopes.
        """

        for lam in (0.0, 0.3, 1.0):
            for scope in ProjectionScope:
                self.assertTrue(abs(gs_tensor([[1.0, 0.0], [0.0, 1.0]], lam, scope) - math.sqrt(2.0)) < 1e-12)
        self.assertTrue(gs_tensor([[2.0, 0.0], [1.0, 0.0]], 1.0) == 2.0)
        value = gs_tensor([[2.0, 0.0], [1.0, 1.0]], 0.5, ProjectionScope.UNMARKED_ONLY)
        self.assertTrue(abs(value - math.sqrt(5.25)) < 1e-9)
        value = gs_tensor([[2.0, 0.0], [1.0, 1.0]], 0.5, ProjectionScope.ALL_VECTORS)
        self.assertTrue(abs(value - math.sqrt(4.65)) < 1e-9)
        self.assertTrue(abs(literal_gs([[2.0, 0.0], [1.0, 1.0]], 0.5, True) - math.sqrt(4.65)) < 1e-9)

    def test_trace(self) -> None:
        """
        The marking order is a permutation; ties go to the lowest index.
        """

        trace = gs_trace([[1.0, 0.0], [0.0, 1.0], [3.0, 4.0]], 1.0)
        self.assertTrue(sorted(trace.order) == [0, 1, 2])
        self.assertTrue(trace.order[0] == 2)
        trace = gs_trace([[1.0, 0.0], [0.0, 1.0]], 0.0)
        self.assertTrue(trace.order == (0, 1))
        self.assertTrue(abs(trace.value - float(np.sqrt(np.sum(trace.vectors**2)))) < 1e-12)

    def test_random_suite(self) -> None:
        """
        N_0 is the root-sum-square; N_lambda never exceeds it and matches the literal algorithm.
        """

        rng = make_rng(2024)
        for _ in range(1000):
            count = int(rng.integers(1, 7))
            dim = int(rng.integers(1, 9))
            vectors = rng.standard_normal((count, dim))
            rss = float(np.sqrt(np.sum(vectors * vectors)))
            self.assertTrue(gs_tensor(vectors, 0.0) == rss)
            lam = float(rng.integers(1, 11)) / 10.0
            for scope in ProjectionScope:
                value = gs_tensor(vectors, lam, scope)
                self.assertTrue(value <= rss + 1e-9)
                oracle = literal_gs(vectors.tolist(), lam, scope == ProjectionScope.ALL_VECTORS)
                self.assertTrue(abs(value - oracle) < 1e-9)

    def test_special_inputs(self) -> None:
        """
        Orthogonal sets are fixed, duplicates collapse at lambda 1, zero vectors are skipped.
        """

        rng = make_rng(5)
        basis, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        scaled = basis.T[:4] * np.array([3.0, 1.0, 2.0, 0.5])[:, None]
        rss = float(np.sqrt(np.sum(scaled * scaled)))
        self.assertTrue(abs(gs_tensor(scaled, 1.0) - rss) < 1e-9)

        vector = rng.standard_normal(5)
        self.assertTrue(abs(gs_tensor([vector, vector], 1.0) - float(np.linalg.norm(vector))) < 1e-12)
        self.assertTrue(gs_tensor([[0.0, 0.0], [0.0, 0.0]], 1.0) == 0.0)
        self.assertTrue(gs_tensor([[3.0, 4.0]], 0.7) == 5.0)

    def test_collinear_pairs(self) -> None:
        """
        At lambda 1 the shorter of two parallel vectors vanishes and the longer one survives, in both scopes.
        """

        value = gs_tensor([[0.4, 0.8], [0.3, 0.6]], 1.0, ProjectionScope.ALL_VECTORS)
        self.assertTrue(abs(value - math.sqrt(0.8)) < 1e-12)

        steps = np.linspace(-1.5, 1.5, 31)
        for first in steps:
            for factor in steps:
                vectors = np.array([[first, 2.0 * first], [factor * first, 2.0 * factor * first]])
                expected = float(np.max(np.linalg.norm(vectors, axis=1)))
                batch = gs_tensor_batch(vectors[None, :, :], 1.0, ProjectionScope.ALL_VECTORS)
                for scope in ProjectionScope:
                    self.assertTrue(abs(gs_tensor(vectors, 1.0, scope) - expected) < 1e-12)
                self.assertTrue(abs(batch[0] - expected) < 1e-12)

    def test_two_vectors_decrease_in_lambda(self) -> None:
        """
        For two vectors and UNMARKED_ONLY, N_lambda does not increase with lambda.
        """

        rng = make_rng(12)
        lams = np.linspace(0.0, 1.0, 11)
        for _ in range(200):
            vectors = rng.standard_normal((2, int(rng.integers(1, 6))))
            values = [gs_tensor(vectors, float(lam), ProjectionScope.UNMARKED_ONLY) for lam in lams]
            self.assertTrue(all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:])))

    def test_permutation_invariance(self) -> None:
        """
        Reordering the vectors does not change N_lambda.
        """

        rng = make_rng(13)
        for _ in range(200):
            vectors = rng.standard_normal((int(rng.integers(2, 6)), int(rng.integers(1, 6))))
            order = rng.permutation(vectors.shape[0])
            lam = float(rng.integers(0, 11)) / 10.0
            for scope in ProjectionScope:
                first = gs_tensor(vectors, lam, scope)
                second = gs_tensor(vectors[order], lam, scope)
                self.assertTrue(abs(first - second) < 1e-9)

    def test_invalid(self) -> None:
        """
        Bad lambdas, empty sets and ragged sets are rejected.
        """

        with self.assertRaises(ValueError):
            gs_tensor([[1.0]], 1.5)
        with self.assertRaises(EmptyInputException):
            gs_tensor([], 0.5)
        with self.assertRaises(DimensionMismatchException):
            gs_tensor([[1.0, 2.0], [1.0]], 0.5)

    def test_batch_matches_single(self) -> None:
        """
        The vectorised tensor equals the per-set tensor.
        """

        rng = make_rng(9)
        vectors = rng.standard_normal((200, 4, 6))
        vectors[7] = 0.0
        vectors[8, 1] = vectors[8, 0]
        for scope in ProjectionScope:
            for lam in (0.0, 0.5, 1.0):
                batch = gs_tensor_batch(vectors, lam, scope)
                single = np.array([gs_tensor(vectors[index], lam, scope) for index in range(200)])
                self.assertTrue(np.allclose(batch, single, rtol=0.0, atol=1e-12))


class TestFusion(unittest.TestCase):
    """
    Test jde_distance(), jde_matrix(), jdl_matrix() and sensor_matrices().
    """

    def test_jde_distance(self) -> None:
        """
        Zero for equal starts, root-sum-square at lambda 0, plain norm for one channel.
        """

        rng = make_rng(4)
        ts = MultiTimeSeries.from_scalars([rng.standard_normal(12) for _ in range(3)])
        params = DelayParams(tau=1, d=3, lam=0.0)
        self.assertTrue(jde_distance(ts, params, 2, 2) == 0.0)
        ws = [ts.channels[i].samples[2:5, 0] - ts.channels[i].samples[6:9, 0] for i in range(3)]
        expected = math.sqrt(sum(float(np.sum(w * w)) for w in ws))
        self.assertTrue(abs(jde_distance(ts, params, 2, 6) - expected) < 1e-12)

        single = MultiTimeSeries.from_scalars([ts.channels[0].samples[:, 0]])
        for lam in (0.0, 0.5, 1.0):
            value = jde_distance(single, DelayParams(tau=1, d=3, lam=lam), 2, 6)
            self.assertTrue(abs(value - float(np.linalg.norm(ws[0]))) < 1e-12)

    def test_constant_and_raw(self) -> None:
        """
        A constant series gives the zero matrix, one channel at d=1 gives raw distances.
        """

        constant = MultiTimeSeries.from_scalars([np.ones(8), np.full(8, 3.0)])
        self.assertTrue(np.all(jde_matrix(constant, DelayParams(d=3, lam=1.0)).values == 0.0))

        samples = np.array([0.0, 2.0, 7.0, 3.0])
        raw = jde_matrix(MultiTimeSeries.from_scalars([samples]), DelayParams(d=1, lam=1.0)).values
        self.assertTrue(np.array_equal(raw, np.abs(samples[:, None] - samples[None, :])))

    def test_single_sample_windows(self) -> None:
        """
        With d=1 and lambda=1 every w_i is a scalar, so JDE is the largest channel difference in both scopes.
        """

        rng = make_rng(30)
        samples = rng.standard_normal((3, 30))
        ts = MultiTimeSeries.from_scalars(list(samples))
        expected = np.max(np.abs(samples[:, :, None] - samples[:, None, :]), axis=0)
        for scope in ProjectionScope:
            params = DelayParams(d=1, lam=1.0, boundary=Boundary.WRAP, scope=scope)
            found = jde_matrix(ts, params).values
            self.assertTrue(np.allclose(found, expected, rtol=0.0, atol=1e-12))
            self.assertTrue(abs(jde_distance(ts, params, 3, 17) - expected[3, 17]) < 1e-12)

    def test_jdl(self) -> None:
        """
        Root-sum-of-squares of the inputs.
        """

        first = jde_matrix(MultiTimeSeries.from_scalars([[0.0, 3.0]]), DelayParams())
        second = jde_matrix(MultiTimeSeries.from_scalars([[0.0, 4.0]]), DelayParams())
        self.assertTrue(jdl_matrix([first, second]).values[0, 1] == 5.0)
        self.assertTrue(np.array_equal(jdl_matrix([first]).values, first.values))
        with self.assertRaises(EmptyInputException):
            jdl_matrix([])
        other = jde_matrix(MultiTimeSeries.from_scalars([[0.0, 4.0, 1.0]]), DelayParams())
        with self.assertRaises(SizeMismatchException):
            jdl_matrix([first, other])

    def test_jdl_is_jde_special_case(self) -> None:
        """
        JDL on raw distances equals JDE with d=1 and lambda=0.
        """

        rng = make_rng(77)
        for _ in range(20):
            channels = int(rng.integers(1, 6))
            length = int(rng.integers(2, 51))
            ts = MultiTimeSeries.from_scalars([rng.standard_normal(length) for _ in range(channels)])
            for boundary in Boundary:
                params = DelayParams(d=1, lam=0.0, boundary=boundary)
                jdl = jdl_matrix(sensor_matrices(ts, params)).values
                jde = jde_matrix(ts, params).values
                self.assertTrue(np.allclose(jdl, jde, rtol=0.0, atol=1e-12))

    def test_pool_matches_serial(self) -> None:
        """
        Chunked evaluation on a thread pool gives the same matrix.
        """

        rng = make_rng(31)
        ts = MultiTimeSeries.from_scalars([rng.standard_normal(40) for _ in range(3)])
        params = DelayParams(tau=2, d=5, lam=1.0, boundary=Boundary.WRAP)
        serial = jde_matrix(ts, params, workers=1)
        pooled = jde_matrix(ts, params, workers=3, chunk_size=50)
        self.assertTrue(np.allclose(serial.values, pooled.values, rtol=0.0, atol=1e-12))
        subset = jde_matrix(ts, params, starts=[0, 5, 9])
        self.assertTrue(abs(subset.values[1, 2] - serial.values[5, 9]) < 1e-12)

    def test_sensor_matrices(self) -> None:
        """
        One matrix per channel, over the window starts of the delay parameters.
        """

        ts = MultiTimeSeries.from_scalars([[0.0, 1.0, 3.0, 6.0], [1.0, 1.0, 1.0, 2.0]])
        matrices = sensor_matrices(ts, DelayParams(d=2))
        self.assertTrue(len(matrices) == 2)
        self.assertTrue(matrices[0].size == 3)
        self.assertTrue(matrices[0].values[0, 2] == 3.0)
        windowed = sensor_matrices(ts, DelayParams(d=2), windowed=True)
        self.assertTrue(abs(windowed[0].values[0, 2] - math.sqrt(9.0 + 25.0)) < 1e-12)


@unittest.skipUnless(os.environ.get("JDE_FUSION_SLOW_TESTS"), "set JDE_FUSION_SLOW_TESTS to run the experiments")
class TestSyntheticExperiments(unittest.TestCase):
    """
    Compare the fusions on many seeds of the synthetic experiments.
    """

    def test_experiment_one(self) -> None:
        """
        JDE with d=20, lambda=1 correlates better with the truth than JDL on most seeds.
        """

        # pylint: disable=import-outside-toplevel
        from src.python_jde_fusion.geomtools import offdiag_correlation
        from src.python_jde_fusion.synth import make_experiment

        wins = 0
        for seed in range(50):
            experiment = make_experiment(1, seed)
            wrap = DelayParams(boundary=Boundary.WRAP)
            jdl = jdl_matrix(sensor_matrices(experiment.series, wrap)).values
            jde = jde_matrix(experiment.series, DelayParams(tau=1, d=20, lam=1.0, boundary=Boundary.WRAP)).values
            truth = experiment.truth.values
            if offdiag_correlation(jde, truth) > offdiag_correlation(jdl, truth):
                wins += 1
        self.assertTrue(wins >= 40)

    def test_experiment_two(self) -> None:
        """
        At d=10, full orthogonalization does at least as well as none on most seeds.
        """

        # pylint: disable=import-outside-toplevel
        from src.python_jde_fusion.geomtools import offdiag_correlation
        from src.python_jde_fusion.synth import make_experiment

        wins = 0
        for seed in range(50):
            experiment = make_experiment(2, seed)
            truth = experiment.truth.values
            scores = [
                offdiag_correlation(
                    jde_matrix(experiment.series, DelayParams(tau=1, d=10, lam=lam, boundary=Boundary.WRAP)).values,
                    truth,
                )
                for lam in (0.0, 1.0)
            ]
            if scores[1] >= scores[0]:
                wins += 1
        self.assertTrue(wins >= 35)


if __name__ == "__main__":
    unittest.main()
