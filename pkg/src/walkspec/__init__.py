"""Biased random walks on regular trees and free products of complete graphs.

Closed formulas, fixed-point solvers, exact log-space DP, Monte-Carlo
estimators and their mutual cross-checks for the spectral radius, speed,
growth rate and return probabilities of the lam-biased walk.
"""

__version__ = "0.1.0"

from .closed_form import (
    occupation_fraction_limit,
    tree_first_return_prob,
    tree_first_return_series,
    tree_green_function,
    tree_return_asymptotic_constant,
    tree_return_probability,
    tree_spectral_radius,
    two_complete_critical_bias,
    two_complete_spectral_radius,
    two_complete_speed,
    zero_bias_spectral_radius_limit,
)
from .dp import (
    SeriesTable,
    compute_series,
    f_series,
    p_series,
    rayleigh_quotient,
    renewal_check,
    rho_from_series,
)
from .errors import WalkspecError
from .fixed_point import (
    Complete,
    Cycle,
    critical_bias,
    free_product_growth,
    free_product_spectral_radius,
    regular_cycle_growth,
    solve_return_series,
)
from .kernel import (
    QuotientChain,
    build_quotient,
    conductance,
    quotient_row,
    stationary_weight,
    transition_row,
)
from .models import (
    FreeProductComplete,
    GraphModel,
    RegularTree,
    VertexAddr,
    enumerate_ball,
    level_degrees,
    neighbors,
    parse_model,
    sphere_sizes,
    validate_model,
)
from .simulate import (
    SimConfig,
    estimate_speed,
    excursion_stats,
    harmonic_split_estimate,
    occupation_fractions,
    simulate_path,
)
from .tails import TailFit, continuity_sweep, fit_tail, verify_f_asymptotics

__all__ = [name for name in dir() if not name.startswith("_")]
