"""Module which draws the SVG figures

Exposes the functions:
- heatmap_svg()
- mds_scatter_svg()
- diagram_svg()
- channels_svg()
- torus_curve_svg()

Figures are built on matplotlib.figure.Figure rather than pyplot, so no global
figure state is shared between pipeline threads.
"""

import logging
import math
from typing import Dict, Optional

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from numpy.typing import ArrayLike

from .core import MultiTimeSeries, PathLike
from .persistence import PersistenceDiagram

matplotlib.use("Agg")

logger = logging.getLogger(__name__)

# Fixed salt and no date stamp, so equal inputs give byte-identical files
matplotlib.rcParams.update({"svg.hashsalt": "python-jde-fusion", "svg.fonttype": "path"})
_SVG_METADATA: Dict[str, Optional[str]] = {"Date": None}

_DIM_COLORS = ["tab:blue", "tab:orange", "tab:green"]


def _save(figure: Figure, path: PathLike) -> None:
    figure.savefig(path, format="svg", metadata=_SVG_METADATA)
    logger.debug("Wrote figure %s", path)


def heatmap_svg(path: PathLike, matrix: ArrayLike, title: str = "") -> Dict[str, float]:
    """Draw a matrix with a linear colour scale from its min to its max.

    Returns:
    Dict[str, float]: The scale bounds, {"min": ..., "max": ...}.
    """

    values = np.asarray(matrix, dtype=np.float64)
    low, high = float(np.min(values)), float(np.max(values))
    figure = Figure(figsize=(5.0, 4.2))
    axes = figure.add_subplot()
    image = axes.imshow(values, cmap="viridis", vmin=low, vmax=high if high > low else low + 1.0, origin="upper")
    figure.colorbar(image, ax=axes)
    if title:
        axes.set_title(title)
    _save(figure, path)
    return {"min": low, "max": high}


def mds_scatter_svg(path: PathLike, coordinates: ArrayLike, title: str = "") -> None:
    """The first two MDS coordinates, joined in time order."""

    points = np.asarray(coordinates, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    ys = points[:, 1] if points.shape[1] > 1 else np.zeros(points.shape[0])
    figure = Figure(figsize=(5.0, 5.0))
    axes = figure.add_subplot()
    axes.plot(points[:, 0], ys, color="0.7", linewidth=0.6)
    axes.scatter(points[:, 0], ys, c=np.arange(points.shape[0]), cmap="viridis", s=10)
    axes.set_xlabel("MDS 1")
    axes.set_ylabel("MDS 2")
    if title:
        axes.set_title(title)
    _save(figure, path)


def diagram_svg(path: PathLike, diagram: PersistenceDiagram, title: str = "") -> None:
    """Birth against death, one colour per dimension; never dying classes sit on a top line."""

    finite = [value for point in diagram.points for value in (point.birth, point.death) if math.isfinite(value)]
    top = max(finite + [diagram.threshold, 1e-12]) * 1.05
    figure = Figure(figsize=(5.0, 5.0))
    axes = figure.add_subplot()
    axes.plot([0.0, top], [0.0, top], color="0.5", linewidth=0.8)
    axes.axhline(top, color="0.5", linestyle="--", linewidth=0.8)
    for dim in range(diagram.max_dim + 1):
        points = diagram.in_dim(dim)
        if not points:
            continue
        births = [point.birth for point in points]
        deaths = [point.death if math.isfinite(point.death) else top for point in points]
        axes.scatter(births, deaths, s=14, color=_DIM_COLORS[dim % len(_DIM_COLORS)], label=f"H{dim}")
    axes.set_xlabel("birth")
    axes.set_ylabel("death")
    axes.set_xlim(0.0, top * 1.02)
    axes.set_ylim(0.0, top * 1.02)
    axes.legend(loc="lower right")
    if title:
        axes.set_title(title)
    _save(figure, path)


def channels_svg(path: PathLike, ts: MultiTimeSeries, title: str = "") -> None:
    """Every channel component against time, one panel per channel."""

    figure = Figure(figsize=(7.0, 1.2 * ts.n_channels + 0.8))
    grid = figure.subplots(ts.n_channels, 1, sharex=True, squeeze=False)
    times = np.arange(ts.length)
    for row, channel in enumerate(ts.channels):
        axes = grid[row, 0]
        axes.plot(times, channel.samples, linewidth=0.8)
        axes.set_ylabel(channel.name, rotation=0, ha="right", fontsize=7)
        axes.tick_params(labelsize=6)
    grid[-1, 0].set_xlabel("t")
    if title:
        figure.suptitle(title)
    _save(figure, path)


def torus_curve_svg(path: PathLike, points: ArrayLike, title: str = "") -> None:
    """A 3-D view of a sampled curve."""

    values = np.asarray(points, dtype=np.float64)
    figure = Figure(figsize=(5.0, 5.0))
    axes = figure.add_subplot(projection="3d")
    closed = np.vstack([values, values[:1]])
    axes.plot(closed[:, 0], closed[:, 1], closed[:, 2], linewidth=0.8)
    axes.scatter(values[:, 0], values[:, 1], values[:, 2], c=np.arange(values.shape[0]), cmap="viridis", s=6)
    if title:
        axes.set_title(title)
    _save(figure, path)
