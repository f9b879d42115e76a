"""curvelab: numerical laboratory for curve geometry and oscillatory integrals."""

from .curves import (Curve, Offspring, OffspringSpec, affine_weight,
                     critical_exponents, cumulative_shifts, offspring,
                     offspring_weight_ratio, power_triple_weight_constant,
                     strong_nondegeneracy, strong_nondegeneracy_grid_min,
                     torsion, torsion_exact, vandermonde)
from .fitting import FitResult, fit_exponent
from .intervals import IntervalSet, intersect_all
from .lorentz import (GridFunction, LorentzIndex, StepFunction,
                      check_convexity_interp, check_r_convexity,
                      check_weak_holder, lorentz_norm, r_convexity_constant,
                      rearrangement, step_product, step_sum,
                      weak_norm_from_samples)
from .lowerbound import (BumpFamily, FrequencyShell, MomentFrame,
                         growth_experiment, sample_shell)
from .quadrature import (BumpDensity, Density, GridDensity, OscResult,
                         SumDensity, bump_profile, critical_time, dominated,
                         extension, extension_batch, gamma_lanczos,
                         polynomial_phase_integral, stationary_phase_constant)
from .totalpos import (ExpMatrixSpec, check_jacobian_vandermonde_bound,
                       injectivity_probe, jacobian_weight_floor,
                       offspring_jacobian, shifted_tangent_determinant,
                       tp_floor_battery, tp_ratio)
from .vandermonde import (MCEstimate, SimplexPoint, SublevelResult,
                          check_vandermonde_inequality, conjugate_sigma_pair,
                          overlap_measure, shift_vandermonde, sublevel_measure,
                          vandermonde_mixed_norm, vandermonde_ratio)

__version__ = "0.1.0"
