"""Module which loads MotionSense DeviceMotion trials

Exposes the functions:
- trial_path()
- bundled_sample_path()
- load_motionsense()

A DeviceMotion trial is a CSV file with a header row naming the modalities and a
leading unnamed row index. The dataset is laid out as
<root>/<activity>/sub_<subject>.csv, for example A_DeviceMotion_data/dws_1/sub_1.csv.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from .core import Channel, MultiTimeSeries, PathLike
from .error import MissingColumnException, TooFewRowsException, UnparseableNumberException
from .lib import DEFAULT_MAX_ROWS, MOTIONSENSE_MODALITIES

logger = logging.getLogger(__name__)

SAMPLE_FILE = "motionsense_sample.csv"


@dataclass(frozen=True)
class TrialSpec:
    """Which trial to load and how many of its leading rows to keep."""

    activity: str = "dws_1"
    subject: int = 1
    max_rows: int = DEFAULT_MAX_ROWS
    channels: List[str] = field(default_factory=lambda: list(MOTIONSENSE_MODALITIES))
    standardize: bool = False

    def __post_init__(self) -> None:
        if self.max_rows < 1:
            raise ValueError(f"max_rows must be positive, got {self.max_rows}")
        if not self.channels:
            raise ValueError("At least one channel must be selected")


def bundled_sample_path() -> Path:
    """The 200-row synthetic trial shipped with the package.

    It has the DeviceMotion layout but its values are generated from smooth
    periodic signals with noise, not recorded.
    """

    return Path(__file__).parent / "data" / SAMPLE_FILE


def trial_path(path: PathLike, spec: TrialSpec) -> Path:
    """path itself if it is a file, otherwise <path>/<activity>/sub_<subject>.csv"""

    location = Path(path)
    if location.is_dir():
        return location / spec.activity / f"sub_{spec.subject}.csv"
    return location


def _standardized(values: NDArray[np.float64]) -> NDArray[np.float64]:
    centered = values - values.mean()
    spread = float(values.std(ddof=1)) if values.size > 1 else 0.0
    if spread == 0.0:
        return np.zeros_like(values)
    scaled: NDArray[np.float64] = centered / spread
    return scaled


def load_motionsense(path: PathLike, spec: TrialSpec = TrialSpec()) -> MultiTimeSeries:
    """Load the selected modalities of a trial as scalar channels.

    Columns are picked by name so their order in the file does not matter;
    any other column is ignored.

    Parameters:
    path (PathLike): A trial CSV or the dataset root.
    spec (TrialSpec): Trial, row count, channels and standardization.

    Returns:
    MultiTimeSeries: One channel per selected modality, in spec.channels order.
    """

    source = trial_path(path, spec)
    frame = pd.read_csv(source, dtype=str, keep_default_na=False)
    frame.columns = [str(column).strip() for column in frame.columns]

    for name in spec.channels:
        if name not in frame.columns:
            raise MissingColumnException(f"Column {name} not found in {source}")
    if len(frame.index) < spec.max_rows:
        raise TooFewRowsException(f"{source} has {len(frame.index)} data rows, {spec.max_rows} required")

    head = frame.iloc[: spec.max_rows]
    channels: List[Channel] = []
    for name in spec.channels:
        text = head[name].str.strip()
        numbers = pd.to_numeric(text, errors="coerce")
        values = numbers.to_numpy(dtype=np.float64)
        broken = np.flatnonzero(~np.isfinite(values))
        if broken.size:
            row = int(broken[0])
            raise UnparseableNumberException(f"Row {row + 1}, column {name}: cannot parse {text.iloc[row]!r}")
        if spec.standardize:
            values = _standardized(values)
        channels.append(Channel(values, name))

    logger.debug("Loaded %d channels x %d rows from %s", len(channels), spec.max_rows, source)
    return MultiTimeSeries(tuple(channels))
