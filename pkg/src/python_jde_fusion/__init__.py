"""Fusion of multi-sensor time series with joint delay embeddings, JDL and SNF.
"""

__version__ = "0.1.0"

from .core import DelayParams, DissimilarityMatrix, MultiTimeSeries, SimilarityMatrix, validate_dissimilarity
from .geomtools import classical_mds, evaluate
from .lib import Boundary, FusionMethod, ProjectionScope, get_boundary_enum, get_scope_enum
from .orthofuse import gs_tensor, jde_distance, jde_matrix, jdl_matrix
from .persistence import rips_persistence
from .snf import SnfConfig, snf_fuse
from .synth import make_experiment
