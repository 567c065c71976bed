"""Equilibria of networked public-goods games and optimal public signaling.

Set ``PERSUADE_NET_BACKEND=numpy`` to skip numba and run the vectorised
kernels; ``PERSUADE_NET_THREADS`` caps numba's worker threads.
"""
__version__ = "0.1.0"

from ._accel import BACKEND
from .benefit import (
    BenefitPair,
    Exponential,
    GameParams,
    PowerSaturating,
    State,
    Tabulated,
    benefit_eval,
    clamp_belief,
    curvature_R,
    curvature_R_tilde,
    delta_b,
    e_star_derivatives,
    mixed_benefit,
    prudence,
    risk_aversion,
    sigma_b,
    sufficient_Y_Z,
    unilateral_effort,
)
from .errors import (
    BracketFailure,
    CapExceeded,
    ConfigError,
    DegenerateDerivative,
    InteriorRequired,
    InvalidBenefit,
    NotAnEquilibrium,
    NotMaximalIndependent,
    PersuadeNetError,
    PriorOnBoundary,
    SingularAfterReduction,
)
from .game import (
    EffortProfile,
    EquilibriumClass,
    Regime,
    aggregate_benefit,
    aggregate_effort,
    benefit_bounds,
    best_response,
    classify_equilibrium,
    distributed_equilibrium,
    enumerate_equilibria,
    is_nash,
    limit_max_benefit,
    specialized_from_mis,
)
from .graph import (
    Graph,
    adjacency_matrix,
    complete_graph,
    cycle_graph,
    degree_plus_one_weights,
    erdos_renyi,
    independence_number,
    maximal_independent_sets,
    network_constant_m,
    parse_edge_list,
    path_graph,
    star_graph,
    twin_reduce,
    weighted_max_independent_set,
)
from .persuasion import (
    Attitude,
    ConcaveEnvelope,
    Objective,
    ObjectiveSpec,
    Policy,
    PolicyClass,
    ReducedObjective,
    classify_policy,
    concave_envelope,
    curvature_recommendation,
    expected_objective,
    optimal_policy,
    policy_sweep,
    posterior,
    reduced_objective,
    sufficient_condition_report,
    symmetry_check,
)
