"""bregprox: Bregman proximal mappings, Moreau envelopes, prox-regularity
certification and proximal alternating minimization, with brute-force
oracles and finite-difference checks validating every formula."""

from .errors import (BregproxError, ConfigError, CrossCheckFailure, DomainError,
                     HessianUnavailable, MultivaluedProx, NotProxBounded,
                     UnboundedSubproblem)
from .kernels import (KERNEL_KINDS, Kernel, ScalarKernel, ball_example_kernel,
                      kernel_roundtrip_check, make_kernel, power_sum_scalar,
                      scale_kernel, separable)
from .divergence import bregman, bregman_batch, bregman_dual_gap, quadratic_bounds
from .objectives import (Curve, ObjectiveFn, box_indicator, compose_conj_grad,
                         curved_example, dent_residual, epigraph_indicator,
                         interval_indicator, linear_objective, neg_quadratic,
                         nonpositive_indicator, power_lp, quadratic_lsq,
                         scaled_abs, segment_indicator, singleton_indicator,
                         tilted, zero_objective)
from .proxcore import (ProxQuery, ProxResult, SearchConfig, left_envelope,
                       prox, prox_bounded_estimate, right_envelope,
                       tilt_identity_check, tilt_transform_point)
from .analytic import (PowerProxSpec, make_power_prox_solver, poly_real_roots,
                       power_prox, power_prox_tilted, power_prox_vector,
                       power_proxreg_modulus)
from .regularity import (ProximalSubgradientWitness, RegularityCertificate,
                         certify_prox_regularity, certify_prox_subgradient,
                         lsmad_check, single_valuedness_scan,
                         subgradient_prox_characterization_check,
                         tilt_invariance_check)
from .envelopes import (envelope_complement_convexity_check, fd_gradient,
                        left_env_grad, left_env_grad_composed,
                        left_envelope_value, oracle_solver, right_env_grad,
                        right_envelope_value)
from .bpam import (BpamProblem, IterateTrace, F_lambda, bpam_palm_u_update,
                   bpam_run, bpg_equivalence_demo, make_oracle_x_update,
                   make_power_x_update, make_sparse_recovery_problem,
                   stationarity_residuals, translated_stationarity_check)

__version__ = "0.1.0"
