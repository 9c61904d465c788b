"""supermt: a numerical laboratory for supercritical exponential-integral
functionals on radial Sobolev functions over the unit ball, their
constrained maximizers, and the associated radial n-Laplacian boundary
value problem with critical-growth nonlinearity."""

from .radial import (RadialGrid, RadialFunction, DimensionConstants,
                     make_grid, constants_for, dirichlet_energy,
                     normalize, pointwise_bound)
from .functionals import (FunctionalSpec, FunctionalValue, ProfileReport,
                          eval_functional, objective_gradient,
                          eval_mt_constant_lower_bound,
                          check_profile_conditions)
from .families import (MoserParams, ConcentratingParams, BlowupRow,
                       moser_function, concentrating_function,
                       mountain_pass_function, blowup_table,
                       default_family_grid, sharpness_lower_bound,
                       c_power_expansion)
from .maximize import (Start, MaximizerOptions, MaximizerReport, GapReport,
                       ProbeReport, maximize, certified_gap_report,
                       divergence_probe, default_multistart)
from .pde import (NonlinearitySpec, ShootingResult, ConditionReport,
                  MountainPassResult, eval_nonlinearity,
                  nonlinearity_primitive, check_conditions, lambda1,
                  shoot, solve_bvp, flux_identity_residual,
                  variational_energy, mountain_pass_level,
                  default_pde_grid)

__version__ = "0.1.0"
