"""Module with sliding window (delay) and joint delay embeddings

Exposes the functions:
- window_plan()
- window_indices()
- sliding_window()
- joint_window()
- difference_vectors()
- pair_difference_vectors()
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import DelayParams, MultiTimeSeries
from .error import IndexOutOfRangeException, WindowOutOfRangeException
from .lib import Boundary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowIndexPlan:
    """Which window starts exist for a series of length T."""

    tau: int
    d: int
    length: int
    boundary: Boundary
    n_windows: int

    def check(self, t: int) -> None:
        """Raise WindowOutOfRangeException unless t is a valid window start."""

        if not 0 <= t < self.n_windows:
            raise WindowOutOfRangeException(
                f"Window start {t} outside [0, {self.n_windows}) for T={self.length}, d={self.d}, tau={self.tau}"
            )

    def indices(self, t: int) -> NDArray[np.int64]:
        """Sample indices of the window starting at t."""

        self.check(t)
        offsets = t + self.tau * np.arange(self.d, dtype=np.int64)
        if self.boundary == Boundary.WRAP:
            offsets %= self.length
        return offsets


def window_plan(length: int, params: DelayParams) -> WindowIndexPlan:
    """Build the window plan for a series of the given length.

    truncate: n_windows = T - (d-1)*tau, which must be at least 1.
    wrap: n_windows = T.
    """

    span = (params.d - 1) * params.tau
    if params.boundary == Boundary.WRAP:
        n_windows = length
    else:
        if length < span + 1:
            raise WindowOutOfRangeException(f"Series of length {length} is shorter than one window ({span + 1})")
        n_windows = length - span
    return WindowIndexPlan(params.tau, params.d, length, params.boundary, n_windows)


def window_indices(plan: WindowIndexPlan) -> NDArray[np.int64]:
    """n_windows x d grid of sample indices, row t is the window starting at t."""

    grid = np.arange(plan.n_windows, dtype=np.int64)[:, None] + plan.tau * np.arange(plan.d, dtype=np.int64)[None, :]
    if plan.boundary == Boundary.WRAP:
        grid %= plan.length
    return grid


def _check_channel(ts: MultiTimeSeries, i: int) -> None:
    if not 0 <= i < ts.n_channels:
        raise IndexOutOfRangeException(f"Channel index {i} outside [0, {ts.n_channels})")


def sliding_window(ts: MultiTimeSeries, i: int, params: DelayParams, t: int) -> NDArray[np.float64]:
    """The delay window of channel i starting at t.

    Parameters:
    ts (MultiTimeSeries): The series.
    i (int): Channel index.
    params (DelayParams): tau, d and boundary.
    t (int): Window start.

    Returns:
    NDArray: d x k array, row j is the sample at t + j*tau (mod T when wrapping).
    """

    _check_channel(ts, i)
    plan = window_plan(ts.length, params)
    samples: NDArray[np.float64] = ts.channels[i].samples[plan.indices(t)]
    return samples


def joint_window(ts: MultiTimeSeries, params: DelayParams, t: int) -> List[NDArray[np.float64]]:
    """The m x d joint window at t; entry (i, j) is the sample x_i(t + j*tau).

    Channels may have different sample dimensions, so the grid is returned as one
    d x k_i array per channel; row i equals sliding_window(ts, i, params, t).
    """

    plan = window_plan(ts.length, params)
    indices = plan.indices(t)
    return [channel.samples[indices] for channel in ts.channels]


def difference_vectors(ts: MultiTimeSeries, params: DelayParams, t1: int, t2: int) -> NDArray[np.float64]:
    """The vectors w_1..w_m for the window pair (t1, t2).

    Entry j of w_i is the distance between sample t1 + j*tau and sample t2 + j*tau
    of channel i.

    Parameters:
    ts (MultiTimeSeries): The series.
    params (DelayParams): tau, d and boundary.
    t1 (int): First window start.
    t2 (int): Second window start.

    Returns:
    NDArray: m x d array, row i is w_i.
    """

    vectors = pair_difference_vectors(ts, params, [t1], [t2])
    return vectors[0]


def pair_difference_vectors(
    ts: MultiTimeSeries, params: DelayParams, starts_a: ArrayLike, starts_b: ArrayLike
) -> NDArray[np.float64]:
    """Batched difference_vectors() over aligned arrays of window starts.

    Returns:
    NDArray: P x m x d array for P pairs.
    """

    plan = window_plan(ts.length, params)
    first = np.asarray(starts_a, dtype=np.int64).reshape(-1)
    second = np.asarray(starts_b, dtype=np.int64).reshape(-1)
    if first.shape != second.shape:
        raise ValueError("Window start arrays must have the same length")
    for starts in (first, second):
        if starts.size and (starts.min() < 0 or starts.max() >= plan.n_windows):
            bad = int(starts[(starts < 0) | (starts >= plan.n_windows)][0])
            plan.check(bad)

    grid = window_indices(plan)
    rows_a = grid[first]
    rows_b = grid[second]
    out = np.empty((first.size, ts.n_channels, params.d), dtype=np.float64)
    for i, channel in enumerate(ts.channels):
        # P x d x k differences, reduced over the sample coordinates
        diff = channel.samples[rows_a] - channel.samples[rows_b]
        out[:, i, :] = np.sqrt(np.einsum("pjk,pjk->pj", diff, diff))
    return out
