"""Shock propagation in 2D periodic nonlinear media.

Predicts shock speeds from jump conditions applied to the homogenized
system, measures them with a second-order finite-volume solver for the
variable-coefficient first-order wave system, and classifies fronts as
viscous shocks or dispersively regularized waves from entropy-refinement
studies.
"""

from .diagnostics import (EntropyTrace, FrontTrace, classify_run, entropy,
                          entropy_trace, measure_speed, shock_position,
                          y_average)
from .errors import (CFLError, ConfigError, DegenerateShockError,
                     FrontNotFoundError, HyperbolicityError,
                     NonPhysicalJumpError, QuadratureError, ShocklabError,
                     StressRangeError)
from .harness import (ExperimentConfig, ExperimentRecord, SweepSpec,
                      emit_outputs, expand_sweep, run_entropy_study,
                      run_experiment, run_sweep)
from .homogenize import (EffectiveMedium, Homogenized1D, effective_density,
                         effective_parameters, homogenized_system)
from .media import (ConstitutiveLaw, MediumSpec, ScalingRecord, cubic_law,
                    exponential_law, g_of_sigma, inverse_stress, linear_law,
                    material_at, normalize, sound_speed, stress,
                    stress_potential)
from .rh import (ShockSetup, connect_right_going, effective_shock_speed,
                 legacy_transverse_speed, sigma_l_for_speed, threshold_ch,
                 threshold_cm)
from .solver import (Grid2D, RunResult, SolverConfig, StateField,
                     riemann_sweep, run, run_homogenized_1d, shock_state,
                     step)

__version__ = "0.1.0"
