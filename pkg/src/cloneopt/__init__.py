"""Minimum-failure probabilistic cloning of two known pure states."""

from .curve_core import (
    CloningProblem,
    CurvePoint,
    FlagOverlap,
    constraint_residual,
    derivatives_at,
    derivatives_at_tau,
    point_at,
    q2_on_curve,
    s_alpha_contains,
    t_bounds,
)
from .errors import (
    CloningError,
    DomainError,
    InfeasiblePointError,
    NumericError,
    SingularityError,
)
from .optimal_cloner import (
    EndpointFailures,
    OptimalSolution,
    PriorWeights,
    brute_force_oracle,
    endpoint_failures,
    prior_of_t,
    solve,
    sweep,
)
from .protocols import (
    CompositeResult,
    TransitionScan,
    UDRegime,
    UDSolution,
    cloning_by_discrimination,
    convergence_gap,
    discrimination_by_cloning,
    transition_scan,
    ud_failure,
)
from .quantum_sim import (
    CloningUnitary,
    MonteCarloTally,
    PureStatePair,
    build_unitary,
    simulate,
    tensor_power,
)

__version__ = "0.1.0"
