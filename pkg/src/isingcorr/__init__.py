"""Diagonal and next-to-diagonal correlations of the planar Ising model.

Several independent evaluation routes are provided (Toeplitz and bordered
Toeplitz determinants, a nonlinear recurrence, complete elliptic integrals
and closed forms at criticality) so that each can be checked against the
others.
"""

from .correlations import (
    CorrelationResult,
    Diagnostics,
    Method,
    ValidationReport,
    critical_nextdiag,
    cross_validate,
    diag_corr,
    dual_corr,
    exchange_corr,
    nextdiag_corr,
    nextdiag_elliptic,
    nextdiag_isotropic_limit,
)
from .determinants import (
    BiorthSnapshot,
    assemble_Y,
    biorth_solve,
    bordered_toeplitz_det,
    lu_det,
    toeplitz_det,
)
from .errors import (
    ConvergenceError,
    DegeneracyError,
    DiscontinuityError,
    DomainError,
    EvaluationError,
    IsingCorrError,
    NearSingularError,
    RegimeError,
    ValidationError,
)
from .painleve import (
    Trajectory,
    asymptotic_r,
    critical_diag,
    critical_system,
    epsilon_star_direct,
    run_epsilon_star,
    run_recurrence,
)
from .weight import (
    IsingParams,
    Phase,
    border_moments,
    classify_phase,
    dual_params,
    exchange_params,
    make_params,
    make_params_sk,
    moment_a,
    moment_a_dual,
    moment_a_quadrature,
    moment_table,
    semiclassical_data,
    weight_eval,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
