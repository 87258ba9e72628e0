"""Typicality-aware mode-seeking clustering with path-based graph-cut aggregation."""

from .baselines import dpc_break, quick_shift
from .errors import ConfigError, DataError, InsufficientModesError, InvariantError, TangoError
from .graph import DependencyForest, SimilarityGraph, build_forest, density, snn_similarity
from .knn import KnnGraph, build_knn, normalize_minmax, read_csv
from .metrics import acc, ari, nmi
from .pathsim import cross_edges, pbsim
from .pipeline import Tango, TangoResult, tango
from .spectral import propagate_labels, spectral_modes
from .typicality import SubClustering, find_modes, solve_typicality, solve_typicality_oracle

__all__ = [
    "ConfigError", "DataError", "DependencyForest", "InsufficientModesError", "InvariantError",
    "KnnGraph", "SimilarityGraph", "SubClustering", "Tango", "TangoError", "TangoResult",
    "acc", "ari", "build_forest", "build_knn", "cross_edges", "density", "dpc_break",
    "find_modes", "nmi", "normalize_minmax", "pbsim", "propagate_labels", "quick_shift",
    "read_csv", "snn_similarity", "solve_typicality", "solve_typicality_oracle",
    "spectral_modes", "tango",
]
