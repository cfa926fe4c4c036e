"""Numerical laboratory for a weighted degenerate-diffusion evolution.

The package discretizes u_t - div(|grad u|^(p-2) grad u) + a(x)|u|^(p-2) u
= B(t, u) on a truncated box with zero boundary values, computes every
constant in its dissipativity and perturbation estimates, and approximates
pullback attractor sections to witness their stability as the weight
perturbation vanishes.
"""

from .attractor import (
    Cloud,
    PairGap,
    PullbackConfig,
    PullbackResult,
    SweepRow,
    attraction_diagnostic,
    hausdorff_semidist,
    invariance_diagnostic,
    load_cloud,
    process_gap,
    pullback_section,
    sample_ball,
    save_cloud,
    usc_sweep,
)
from .bounds import (
    DissipationReport,
    GronwallCheck,
    build_report,
    decay_envelope,
    decay_ode_solve,
    gronwall_factor,
    gronwall_window_check,
    perturbation_envelope,
    report_from_young,
)
from .config import RunConfig, config_echo, parse_config
from .errors import (
    ConfigError,
    GridMismatchError,
    InfeasibleYoungError,
    InnerSolverError,
    InvariantError,
    PlaplabError,
)
from .forcing import AmplitudeSchedule, Forcing, make_forcing, make_profile
from .grid import (
    Grid,
    State,
    check_same_grid,
    energy_norm,
    energy_norm_pow,
    grad,
    inner_l2,
    load_state,
    make_grid,
    make_state,
    norm_l2,
    norm_lp,
    project_dirichlet,
    require_dirichlet,
    save_state,
    zero_state,
)
from .operators import (
    TARTAR_CONSTANT,
    Energy,
    energy,
    energy_gradient,
    monotonicity_gap,
    tartar_lower_bound,
)
from .stepper import ProxResult, StepConfig, Trajectory, evolve, prox_step, prox_step_full
from .weights import (
    EPS_MAX,
    IntegrabilityResult,
    TheoryParams,
    WeightField,
    embedding_constant,
    embedding_from_integral,
    integrability,
    make_weight,
    tail_mass,
    truncation_tail_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSchedule",
    "Cloud",
    "ConfigError",
    "DissipationReport",
    "EPS_MAX",
    "Energy",
    "Forcing",
    "Grid",
    "GridMismatchError",
    "GronwallCheck",
    "InfeasibleYoungError",
    "InnerSolverError",
    "IntegrabilityResult",
    "InvariantError",
    "PairGap",
    "PlaplabError",
    "ProxResult",
    "PullbackConfig",
    "PullbackResult",
    "RunConfig",
    "State",
    "StepConfig",
    "SweepRow",
    "TARTAR_CONSTANT",
    "TheoryParams",
    "Trajectory",
    "WeightField",
    "attraction_diagnostic",
    "build_report",
    "check_same_grid",
    "config_echo",
    "decay_envelope",
    "decay_ode_solve",
    "embedding_constant",
    "embedding_from_integral",
    "energy",
    "energy_gradient",
    "energy_norm",
    "energy_norm_pow",
    "evolve",
    "grad",
    "gronwall_factor",
    "gronwall_window_check",
    "hausdorff_semidist",
    "inner_l2",
    "integrability",
    "invariance_diagnostic",
    "load_cloud",
    "load_state",
    "make_forcing",
    "make_grid",
    "make_profile",
    "make_state",
    "make_weight",
    "monotonicity_gap",
    "norm_l2",
    "norm_lp",
    "parse_config",
    "perturbation_envelope",
    "process_gap",
    "project_dirichlet",
    "prox_step",
    "prox_step_full",
    "pullback_section",
    "report_from_young",
    "require_dirichlet",
    "sample_ball",
    "save_cloud",
    "save_state",
    "tail_mass",
    "tartar_lower_bound",
    "truncation_tail_bound",
    "usc_sweep",
    "zero_state",
    "__version__",
]
