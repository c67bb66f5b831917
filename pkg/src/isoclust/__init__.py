"""Nearest-neighbour-induced isolation similarity, the tree-induced
variant, and mass-based density clustering built on top of them."""

__version__ = "0.1.0"

from .cluster import NOISE, Clustering, DPState, dbscan, density_peaks, dp_state, mass_connected
from .dataset import (
    Dataset,
    NormalizationReport,
    load_csv,
    min_max_normalize,
    save_csv,
    synth_three_cluster_hard,
    synth_two_density,
)
from .evaluation import (
    DetectabilityReport,
    F1Report,
    ParamGrid,
    SweepReport,
    default_grid,
    detectability_diagnostic,
    f1_score,
    grid_search,
)
from .neighbourhood import (
    NeighbourhoodFunction,
    alpha_neighbourhood_graph,
    neighbourhood_count,
    neighbourhood_counts,
    neighbourhood_curve,
)
from .partition import (
    KIND_ANNE,
    KIND_IFOREST,
    IsolationTree,
    PartitionEnsemble,
    VoronoiPartitioning,
    build_ensemble,
    cell_of,
    load_ensemble,
    same_cell,
    save_ensemble,
)
from .similarity import (
    EUCLIDEAN,
    DissimilarityMatrix,
    contour_grid,
    dissimilarity_matrix,
    exact_similarity,
    load_matrix_npz,
    save_matrix_csv,
    save_matrix_npz,
    similarity,
)
from .simulate import (
    SimulationConfig,
    SimulationResult,
    default_config,
    simulate_vs_distance,
    simulate_vs_psi,
    two_density_field,
)
