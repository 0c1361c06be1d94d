"""Multi-scale control variate Monte Carlo for uncertainty quantification
in kinetic equations (Boltzmann, BGK, and their Euler limit)."""

__version__ = "0.1.0"

from .errors import (ConfigError, KineticUQError, NumericalError,
                     PairingError, ParameterError)
from .phase_grid import (MomentSet, SpatialGrid1D, VelocityGrid,
                         compute_moments, moment_fields, rooted_norm,
                         uq_error_norm, weighted_norm)
from .equilibrium import (maxwellian, maxwellian_from_moments,
                          micro_macro_split, moment_matched_maxwellian)
from .collision_ops import (CollisionKernel, SpectralPlan, entropy,
                            micro_macro_residual, q_bgk, q_boltzmann_direct,
                            q_boltzmann_fast)
from .homogeneous_solver import (bgk_exact, bgk_exact_expectation,
                                 bgk_random_nu_expectation, rk4_step,
                                 solve_homogeneous)
from .euler1d import (conserved, euler_flux, euler_step, lift_to_equilibrium,
                      primitive, solve_euler)
from .kinetic1d import (diffusive_wall, kinetic_step, solve_kinetic,
                        transport_step, wall_net_flux)
from .uq_core import (CostModel, EstimatorResult, allocate_samples,
                      lambda_cost_corrected, lambda_star, lambda_star_moment,
                      mc_estimate, mscv_estimate_field,
                      mscv_estimate_homogeneous, sample_z,
                      var_cov_estimators, variance_reduction_report)
from .experiments import (ExperimentConfig, ExperimentResult, build_test,
                          collocation_reference, run_experiment)
