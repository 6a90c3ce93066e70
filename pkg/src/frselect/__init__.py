"""Conditional-dependency feature selection via a global Friedman-Rafsky statistic."""

from .data import (
    ClassPartition,
    Dataset,
    PairSample,
    SyntheticSpec,
    extract_pair,
    generate_gaussian_mixture,
    lattice_means,
    load_csv,
    partition_by_class,
    save_csv,
)
from .estimator import (
    BoundEstimate,
    DeltaMatrix,
    PermutedSample,
    SplitHalves,
    count_cross_runs,
    estimate_pair_bound,
    pairwise_fr_baseline,
    permute_within_class,
    split_stratified,
)
from .mst import (
    CrossCountMatrix,
    PointCloud,
    SpanningTree,
    brute_force_min_weight,
    build_mst,
    cross_edge_counts,
    jittered,
)
from .oracle import (
    ConditionalModel,
    QuadratureGrid,
    bound_true,
    conditional_gmi_true,
    delta_matrix_true,
    delta_true,
    hp_divergence_half,
    load_model,
    markov_joint,
    mixture_joint,
    save_model,
)
from .selection import (
    BoundMatrix,
    FeatureScores,
    FRSelector,
    SelectionResult,
    aggregate_scores,
    compute_bound_matrix,
    derive_pair_seed,
    knn_holdout_accuracy,
    select_above,
    select_k,
    select_k_iterative,
)
from .validation import ValidationError

__version__ = "0.1.0"

__all__ = [
    "BoundEstimate",
    "BoundMatrix",
    "ClassPartition",
    "ConditionalModel",
    "CrossCountMatrix",
    "Dataset",
    "DeltaMatrix",
    "FRSelector",
    "FeatureScores",
    "PairSample",
    "PermutedSample",
    "PointCloud",
    "QuadratureGrid",
    "SelectionResult",
    "SpanningTree",
    "SplitHalves",
    "SyntheticSpec",
    "ValidationError",
    "aggregate_scores",
    "bound_true",
    "brute_force_min_weight",
    "build_mst",
    "compute_bound_matrix",
    "conditional_gmi_true",
    "count_cross_runs",
    "cross_edge_counts",
    "delta_matrix_true",
    "delta_true",
    "derive_pair_seed",
    "estimate_pair_bound",
    "extract_pair",
    "generate_gaussian_mixture",
    "hp_divergence_half",
    "jittered",
    "knn_holdout_accuracy",
    "lattice_means",
    "load_csv",
    "load_model",
    "markov_joint",
    "mixture_joint",
    "pairwise_fr_baseline",
    "partition_by_class",
    "permute_within_class",
    "save_csv",
    "save_model",
    "select_above",
    "select_k",
    "select_k_iterative",
    "split_stratified",
]
