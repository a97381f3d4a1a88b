"""Radial solver lab for the quasilinear parabolic problem

    u_t - Δu - κuΔ(u²) + u = |u|^{p-1}u  in R^N,

with ground states by shooting, their linearized spectrum, and the
amplitude threshold between decay and blow-up.
"""

from .core import (Field, RadialGrid, derivative, gradient_sq, h1_norm_sq, integrate, l2_norm,
                   make_grid, radial_laplacian, sphere_measure, sup_norm)
from .errors import (AdmissibilityError, BracketFailure, ConvergenceFailure, DegenerateWindow,
                     NoBracket, NumericalFailure, PreconditionError, QuasiflowError, SchemaError,
                     StiffnessBreakdown)
from .params import Params, critical_exponent, threshold_constant
from .energy import (blowup_certificate, energy, energy_identity_residual, energy_local,
                     energy_monotonicity_violation, p3_condition, plateau_profile)
from .flow import (Classification, FlowState, Trajectory, classify, co_evolve, evolve,
                   initial_profile, monotonicity_check, order_check, rhs, step)
from .stationary import (StationaryProfile, decay_rate, first_integral_residual_1d, ode_residual,
                         pohozaev_residual, pohozaev_terms, shoot)
from .spectral import SectorOperator, SpectrumResult, assemble_sector, eig_smallest, nondegeneracy_report
from .bifurcation import BisectionResult, bisect_lambda, kappa_sweep, threshold_run
from .records import RunRecord, load_run, serialize_run

__version__ = "0.1.0"
