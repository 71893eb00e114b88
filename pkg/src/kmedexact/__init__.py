"""Exact k-Median, k-Means and facility-location solvers with brute-force oracles."""

from .exact import (
    ExactResult,
    Guess,
    InvariantViolation,
    UnsupportedObjective,
    brute_force_solve,
    build_auxiliary_graph,
    count_guesses,
    decode_matching,
    enumerate_guesses,
    solve_exact,
)
from .facility import (
    FLClustering,
    FLInstance,
    InfeasibleError,
    brute_force_fl,
    min_sum_convolve,
    naive_min_sum_convolve,
    solve_fl,
)
from .matching import Matching, WeightedGraph, brute_force_perfect_matching, min_weight_perfect_matching
from .metric import (
    CapacityError,
    Clustering,
    InstanceError,
    MetricInstance,
    Objective,
    evaluate_cost,
    nearest_assignment,
)
from .reductions import (
    SetSystem,
    SimpleGraph,
    check_domset_property,
    check_setcover_property,
    domset_to_kmedian,
    kcenter_by_threshold,
    setcover_to_fl,
    threshold_graph,
)

__version__ = "0.1.0"

__all__ = [
    "ExactResult",
    "Guess",
    "InvariantViolation",
    "UnsupportedObjective",
    "brute_force_solve",
    "build_auxiliary_graph",
    "count_guesses",
    "decode_matching",
    "enumerate_guesses",
    "solve_exact",
    "FLClustering",
    "FLInstance",
    "InfeasibleError",
    "brute_force_fl",
    "min_sum_convolve",
    "naive_min_sum_convolve",
    "solve_fl",
    "Matching",
    "WeightedGraph",
    "brute_force_perfect_matching",
    "min_weight_perfect_matching",
    "CapacityError",
    "Clustering",
    "InstanceError",
    "MetricInstance",
    "Objective",
    "evaluate_cost",
    "nearest_assignment",
    "SetSystem",
    "SimpleGraph",
    "check_domset_property",
    "check_setcover_property",
    "domset_to_kmedian",
    "kcenter_by_threshold",
    "setcover_to_fl",
    "threshold_graph",
]
