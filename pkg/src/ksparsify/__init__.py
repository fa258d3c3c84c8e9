"""Importance-sampling sparsifiers for decomposable monotone k-submodular functions."""
from .estimators import ImportanceSparsifier, PeakEstimator
from .exceptions import (DomainTooLargeError, HypothesisError, NotMonotoneError, SparsifyError,
                         SupportError)
from .generators import (complete_bipartite_cut, coverage_function, coverage_instance,
                         directed_cut_instance, generate, local_coverage_instance,
                         random_digraph_cut, random_table)
from .io import instance_from_dict, instance_to_dict, load_instance, save_instance
from .model import (Callback, ComponentFunction, Coverage, DecomposableInstance, DirectedCut,
                    ExplicitTable, GroundSet, curvature, curvature_with_source, empty_marginals,
                    evaluate, join, marginal_gain, meet, modular, verify_k_submodular,
                    verify_monotone)
from .peaks_curvature import approx_peaks, approx_ratio_max
from .peaks_exact import PeakEstimates, effective_support, exact_peaks, peaks_bounded_arity
from .polyhedron import (check_sum_pi_bound, counterexample_instance, extreme_points,
                         extreme_points_bounded_arity, in_base_polyhedron,
                         verify_max_inner_product)
from .ratio import RatioInstance, brute_force, fptas, rho
from .sampler import SparsifierWeights, kappa, run_trials, sample, verify_sparsifier

__version__ = "0.1.0"

__all__ = [
    "Callback", "ComponentFunction", "Coverage", "DecomposableInstance", "DirectedCut",
    "DomainTooLargeError", "ExplicitTable", "GroundSet", "HypothesisError", "ImportanceSparsifier",
    "NotMonotoneError", "PeakEstimates", "PeakEstimator", "RatioInstance", "SparsifierWeights",
    "SparsifyError", "SupportError", "approx_peaks", "approx_ratio_max", "brute_force",
    "check_sum_pi_bound", "complete_bipartite_cut", "counterexample_instance", "coverage_function",
    "coverage_instance", "curvature", "curvature_with_source", "directed_cut_instance",
    "effective_support", "empty_marginals", "evaluate", "exact_peaks", "extreme_points",
    "extreme_points_bounded_arity", "fptas", "generate", "in_base_polyhedron", "instance_from_dict",
    "instance_to_dict", "join", "kappa", "load_instance", "local_coverage_instance",
    "marginal_gain", "meet", "modular", "peaks_bounded_arity", "random_digraph_cut",
    "random_table", "rho", "run_trials", "sample", "save_instance", "verify_k_submodular",
    "verify_max_inner_product", "verify_monotone", "verify_sparsifier",
]
