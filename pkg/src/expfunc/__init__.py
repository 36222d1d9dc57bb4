"""Densities, tails and asymptotics of exponential functionals of subordinators."""
from .asymptotics import asymptotic_constant, asymptotic_density_deriv, cpp_asymptotic, exponent_integral, ratio_table
from .bernstein import BernsteinSpec, phi, phi_all, phi_deriv, positive_increase_report, validate_inequalities
from .bgamma import E_phis, T_phis, log_mellin, log_W, stirling_parts
from .config import FIXTURES, load_fixture, load_model, parse_model
from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    ExpFuncError,
    InconclusiveDiagnostic,
    NonconvergentQuadrature,
    NonconvergentRootFind,
    PositiveIncreaseUnverified,
    TruncationUnbounded,
)
from .inversion import contour_plan, density_deriv, moment, tail
from .measures import Atoms, Density, ExpJumpCPP, GammaSub, NoJumps, Stable
from .montecarlo import SimConfig, compare_to_inversion, sample_batch
from .phistar import phi_star, varphi_star, varphi_star_deriv

__version__ = "0.1.0"
