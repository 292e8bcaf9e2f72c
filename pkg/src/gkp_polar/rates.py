"""Scalar information functionals of the analog-syndrome GKP channel.

The headline quantity is the achievable rate with analog information,

    I_analog(d, sigma) = log2(d) + 2 int ds1 sum_u p1(u, s1) log2(p1(u, s1) / p(s1)),

which for d >> 1/sigma^2 converges to the displacement channel's coherent
information log2(1 / (sigma^2 e)).  The same integrand, reorganised, gives
the per-channel symmetric capacity I(W1) in dits (amplitude side; the phase
side has I(W2) = I(W1) since p2(v, s2) = p1(v, -s2)), so

    I_analog = log2(d) * (I(W1) + I(W2) - 1)

holds identically; the two code paths here compute the syndrome marginal by
different routes (closed theta form vs explicit residue sum), making the
identity a genuine cross-check rather than a tautology.

All quadratures are composite Gauss-Legendre over the syndrome interval
[-1/2, 1/2); entropic conventions use 0 * log 0 = 0 throughout.  I(W)/Z(W)
are internally computed in dits, converted to bits only at this API surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, centered_residues, log_p_joint_table
from .quadrature import composite_gl
from .theta import log_lattice_theta

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateResult:
    """A rate in bits per mode plus the quadrature refinement residual."""

    value_bits: float
    quadrature_error_est: float
    spec: ChannelSpec

    def __post_init__(self):
        if self.quadrature_error_est < 0:
            raise ValueError("quadrature error estimate must be non-negative")


def coherent_info_displacement(sigma: float) -> float:
    """Coherent information of Gaussian displacement noise: log2(1/(sigma^2 e))."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return -math.log2(sigma * sigma * math.e)


def _log_p_syndrome(spec: ChannelSpec, s: np.ndarray) -> np.ndarray:
    # closed theta form: p(s1) = theta3(pi s1, e^{-d pi sigma^2})
    return log_lattice_theta(s, spec.d * spec.sigma ** 2)


def rate_analog(spec: ChannelSpec) -> RateResult:
    """Achievable rate with analog syndrome information, in bits per mode."""

    def integrand(s):
        logp = log_p_joint_table(spec, s)
        p = np.exp(logp)
        return (p * (logp - _log_p_syndrome(spec, s)[:, None])).sum(axis=1) / LN2

    val, err = composite_gl(integrand, -0.5, 0.5)
    return RateResult(math.log2(spec.d) + 2.0 * val, 2.0 * err, spec)


def _p_residue_marginal(spec: ChannelSpec) -> np.ndarray:
    """p(u) = int p1(u, s1) ds1 for u = 0..d-1 via closed-form erf differences."""
    d, sigma = spec.d, spec.sigma
    cent = centered_residues(d)
    # rounding of N(0, d sigma^2 / 2pi) lands on u mod d
    c = math.sqrt(math.pi) / (sigma * math.sqrt(d))
    lmax = 2 + math.ceil(3.7 * sigma / math.sqrt(d))
    p = np.zeros(d)
    for r in range(d):
        for l in range(-lmax, lmax + 1):
            m = d * l + cent[r]
            p[r] += 0.5 * (math.erf(c * (m + 0.5)) - math.erf(c * (m - 0.5)))
    return p


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def rate_no_analog(spec: ChannelSpec) -> RateResult:
    """Baseline rate with the syndrome averaged out: log2(d) - 2 H2(p(u)).

    Bit and phase marginals are identical, hence the factor 2.  The marginal
    is closed-form (Gaussian rounding probabilities), so the error estimate
    is the truncation level of the erf sum, effectively zero.
    """
    p = _p_residue_marginal(spec)
    return RateResult(math.log2(spec.d) - 2.0 * _entropy_bits(p), 0.0, spec)


def rate_rect(spec: ChannelSpec, f: float) -> RateResult:
    """Rectangular-bias rate: the mean of the square rate at sigma*f and sigma/f."""
    if f < 1.0:
        raise ValueError(f"aspect ratio f must be >= 1, got {f}")
    hi = rate_analog(ChannelSpec(spec.d, spec.sigma * f))
    lo = rate_analog(ChannelSpec(spec.d, spec.sigma / f))
    return RateResult(0.5 * (hi.value_bits + lo.value_bits),
                      0.5 * (hi.quadrature_error_est + lo.quadrature_error_est),
                      spec)


def _mutual_info_dits(spec: ChannelSpec, phase: bool) -> float:
    """I(W) in dits; the output marginal is summed over residues explicitly."""
    lnd = math.log(spec.d)

    def integrand(s):
        ss = -s if phase else s
        logp = log_p_joint_table(spec, ss)
        p = np.exp(logp)
        marg = p.sum(axis=1)
        return (p * (logp - np.log(marg)[:, None] + lnd)).sum(axis=1)

    val, _ = composite_gl(integrand, -0.5, 0.5)
    return val / lnd


def channel_mutual_info_w1(spec: ChannelSpec) -> float:
    """Symmetric capacity I(W1) of the amplitude-side channel, in dits."""
    return _mutual_info_dits(spec, phase=False)


def channel_mutual_info_w2(spec: ChannelSpec) -> float:
    """Symmetric capacity I(W2) of the phase-side channel, in dits."""
    return _mutual_info_dits(spec, phase=True)


def _bhattacharyya(spec: ChannelSpec, phase: bool) -> float:
    d = spec.d

    def integrand(s):
        ss = -s if phase else s
        logp = log_p_joint_table(spec, ss)
        r = np.exp(0.5 * logp)
        tot = r.sum(axis=1)
        # sum over a != 0 of sum_y r[y] r[y-a] is the full cyclic square minus a = 0
        return (tot * tot - (r * r).sum(axis=1)) / (d - 1)

    val, _ = composite_gl(integrand, -0.5, 0.5)
    return val


def bhattacharyya_w1(spec: ChannelSpec) -> float:
    """Z(W1) = (1/(d-1)) sum_{a!=0} int ds sum_y sqrt(p1(y,s) p1(y-a,s))."""
    return _bhattacharyya(spec, phase=False)


def bhattacharyya_w2(spec: ChannelSpec) -> float:
    """Z(W2), the phase-side pairwise overlap."""
    return _bhattacharyya(spec, phase=True)


def rate_selfdual_staircase(sigma: float) -> float:
    """Largest integer-dimension rate under the coherent information.

    log2(k) for the largest integer k >= 1 with log2(k) <= I_c(sigma); 0 when
    even k = 1 does not fit.  Stand-in for the rescaled-lattice baseline whose
    per-mode dimension must be an integer.
    """
    ic = coherent_info_displacement(sigma)
    if ic < 0.0:
        return 0.0
    return math.log2(max(1, math.floor(2.0 ** ic)))


@dataclass(frozen=True)
class GapDiagnostics:
    """Leading small-gap terms (unit constants) and the measured rate gap."""

    measured_gap: float
    syndrome_flatness_term: float   # e^{-d pi sigma^2}
    central_tail_term: float        # sqrt(d) sigma^{-1} e^{-pi d / (9 sigma^2)}


def gap_diagnostics(spec: ChannelSpec) -> GapDiagnostics:
    """Evaluate |rate_analog - I_c| together with its leading analytic scales."""
    d, sigma = spec.d, spec.sigma
    gap = abs(rate_analog(spec).value_bits - coherent_info_displacement(sigma))
    return GapDiagnostics(
        measured_gap=gap,
        syndrome_flatness_term=math.exp(-d * math.pi * sigma ** 2),
        central_tail_term=math.sqrt(d) / sigma * math.exp(-math.pi * d / (9.0 * sigma ** 2)),
    )
