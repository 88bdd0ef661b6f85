"""Testing independence between network connectivity and nodal attributes
with diffusion maps and distance-based correlations."""
from .config import RunConfig
from .depcorr import (
    center,
    dcorr,
    hhg_statistic,
    local_correlation_map,
    mgc,
    mgc_statistic,
    nearest_neighbor_ranks,
    pairwise_euclidean,
)
from .dmgc import TestReport, TSweepResult, network_test, permutation_test, smoothed_max, t_sweep
from .errors import DataError, NetdepError, NumericalError, ParameterError, ParseError
from .graph import AdjacencyMatrix, adjacency, normalized_laplacian, symmetrize
from .spectral import (
    adjacency_spectral_embedding,
    decompose,
    diffusion_distance,
    diffusion_map,
    zhu_ghodsi_elbows,
)

__version__ = "0.1.0"
