"""Concatenated square-GKP coding toolkit.

Analog-syndrome channel model for square GKP qudits under Gaussian
displacement noise, achievable-rate functionals, prime-field polar code
construction and successive-cancellation decoding over those channels,
end-to-end block simulation, and lattice-theta capacity bounds for the
pure-loss channel.
"""

__version__ = "0.1.0"

from .channel import (ChannelSpec, FiniteEnergyParams, SyndromeSample,
                      effective_sigma, p_cond, p_joint, p_joint_finite,
                      p_joint_phase, p_lim, p_syndrome, lim_gap_bound, sample)
from .design import (DesignArtifact, IndexSets, ZEstimates, classify,
                     design_code, design_sequence, estimate_z,
                     net_rate_and_bounds)
from .loss import (LossParams, SequencePoint, capacity_sequence,
                   count_self_orthogonal, infidelity_bound_log, s_g)
from .polar import (LLR_INF, PolarCodeSpec, PrimeField, brute_force_wi,
                    f_check, g_variable, hard_decision, polar_encode,
                    polar_encode_inverse, sc_decode)
from .quadrature import NumericError, QuadratureError, composite_gl
from .rates import (GapDiagnostics, RateResult, bhattacharyya_w1,
                    bhattacharyya_w2, channel_mutual_info_w1,
                    channel_mutual_info_w2, coherent_info_displacement,
                    gap_diagnostics, rate_analog, rate_no_analog, rate_rect,
                    rate_selfdual_staircase)
from .sim import SimConfig, SimReport, estimate_logical_error, simulate_block
from .theta import duality_residual, theta2, theta3
