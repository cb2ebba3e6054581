"""Pulsed diffusive logistic population dynamics on a periodically evolving interval.

The library computes the closed-form ecological reproduction index of the
problem, simulates the transformed fixed-domain PDE with an IMEX
finite-difference scheme, constructs analytic upper/lower solutions and
monotone brackets of the positive periodic state, and reproduces the
built-in benchmark scenarios with CSV artifacts.
"""

from .engine import (
    Grid,
    OutputSpec,
    StateField,
    Trajectory,
    apply_impulse,
    initial_condition,
    simulate,
    step_interval,
)
from .errors import (
    ConfigError,
    EnvelopeUndefinedError,
    EvodomError,
    InstabilityError,
    InvalidInitialConditionError,
    InvalidLowerSolutionSpecError,
    IterationOrderBrokenError,
    NoPositivePeriodicSolutionError,
    PeriodMapConvergenceError,
    PulseDomainError,
    QuadratureError,
    SweepPathError,
)
from .experiments import (
    PRESETS,
    DecayEstimate,
    RunRecord,
    Scenario,
    SweepResult,
    classify,
    estimate_decay_rate,
    get_preset,
    load_config,
    parse_config,
    reconstruct_physical,
    run_scenario,
    sweep,
)
from .model import (
    EnvelopePair,
    EvolutionRate,
    ModelParams,
    PulseFunction,
    build_envelopes,
    eval_pulse,
    pulse_derivative_at_zero,
)
from .periodic import (
    BracketPair,
    ExtinctionCertificate,
    LowerSolution,
    LowerSolutionSpec,
    NonmonotoneBracket,
    PeriodicSolution,
    PeriodOrbit,
    UpperSolution,
    build_lower_solution,
    build_upper_solution,
    minimal_periodic_ode_orbit,
    monotone_iteration,
    nonmonotone_bracket,
    period_map_fixed_point,
)
from .spectral import (
    IndexReport,
    PeriodicOdeSolution,
    TemporalFactor,
    compute_index,
    compute_r_noimpulse,
    periodic_ode_solution,
    principal_eigenvalue,
    quad_rho_inv_sq,
    temporal_factor,
)

__version__ = "0.1.0"
