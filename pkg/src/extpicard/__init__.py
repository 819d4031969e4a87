"""Extended Picard iteration for nonlinear ODE systems, with reference
integrators and the benchmark problems used to evaluate it."""
from .analysis import ErrorTable, l2_mean_error, reproduce_table
from .curves import PiecewiseCurve
from .errors import (ConfigError, DegenerateFitError, DivergenceError, ExtPicardError,
                     InsufficientRootsError, InvalidArgumentError, RootNotFoundError,
                     ShootingFailureError, UnsupportedOperationError)
from .jets import Jet
from .linalg import VecPoly, exp_poly_integral, mat_exp, op_norm
from .picard import (ConvergenceReport, OdeSystem, SolveSettings, convergence_diagnostic,
                     fit_forcing_polynomial, homogeneous_seed, picard_iterate_segment,
                     solve_segmented, split_system, standard_picard_iterate_segment)
from .problems import (BratuExact, ProblemSpec, StabilityReport, bratu_exact, bratu_exact_theta,
                       bratu_quadratic_system, bratu_shoot, bratu_vim_reference,
                       brusselator_stability, brusselator_system, brusselator_w_system,
                       duffing_system, glycolysis_stability, glycolysis_system,
                       mathieu_char_series, mathieu_char_values, mathieu_system)
from .reference import JetSeries, rk8_solve, taylor_solve
from .roots import root_find_scalar

__all__ = [
    "ErrorTable",
    "l2_mean_error",
    "reproduce_table",
    "PiecewiseCurve",
    "ConfigError",
    "DegenerateFitError",
    "DivergenceError",
    "ExtPicardError",
    "InsufficientRootsError",
    "InvalidArgumentError",
    "RootNotFoundError",
    "ShootingFailureError",
    "UnsupportedOperationError",
    "Jet",
    "VecPoly",
    "exp_poly_integral",
    "mat_exp",
    "op_norm",
    "ConvergenceReport",
    "OdeSystem",
    "SolveSettings",
    "convergence_diagnostic",
    "fit_forcing_polynomial",
    "homogeneous_seed",
    "picard_iterate_segment",
    "solve_segmented",
    "split_system",
    "standard_picard_iterate_segment",
    "BratuExact",
    "ProblemSpec",
    "StabilityReport",
    "bratu_exact",
    "bratu_exact_theta",
    "bratu_quadratic_system",
    "bratu_shoot",
    "bratu_vim_reference",
    "brusselator_stability",
    "brusselator_system",
    "brusselator_w_system",
    "duffing_system",
    "glycolysis_stability",
    "glycolysis_system",
    "mathieu_char_series",
    "mathieu_char_values",
    "mathieu_system",
    "JetSeries",
    "rk8_solve",
    "taylor_solve",
    "root_find_scalar",
]

__version__ = "0.1.0"
