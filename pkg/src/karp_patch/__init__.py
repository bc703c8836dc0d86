"""Karp's patching heuristic for the asymmetric TSP on dense random digraphs."""

from .assignment import Matching, SolveReport, matching_to_permutation, solve_assignment, solve_assignment_pruned
from .errors import (
    ConfigError,
    DegreeInfeasible,
    Infeasible,
    InvalidMove,
    InvalidTour,
    MissingArc,
    NoPatchAvailable,
    ParseError,
    SchemaError,
    Stuck,
    TooLarge,
)
from .graph import CostModel, DenseDigraph, Topology, generate_instance, load_instance, save_instance, validate_membership
from .harness import ExperimentConfig, TrialRecord, emit, run_experiment, run_trial
from .oracles import ExactResult, brute_force_ap, held_karp_atsp
from .patching import (
    CycleCover,
    PatchMove,
    Tour,
    apply_patch,
    count_patching_pairs,
    find_cheapest_patch,
    patch_to_tour,
    permutation_to_cover,
    verify_tour,
)

__version__ = "0.1.0"
