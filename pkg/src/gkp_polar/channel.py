"""Single-mode square-lattice GKP logical noise model under Gaussian displacement noise.

After one round of minimal-shift correction, a square GKP qudit of prime
dimension ``d`` under displacement noise of spread ``sigma`` is left with a
residual Pauli error whose amplitude part ``u`` and analog syndrome
``s1 in [-1/2, 1/2)`` follow the joint density

    p1(u, s1) = (1/d) theta3(pi (u + s1) / d, e^{-pi sigma^2 / d})
              = (1 / (sigma sqrt(d))) sum_l exp(-(pi d / sigma^2) (l + (u+s1)/d)^2),

a function of the centred value of (u + s1)/d alone.  The phase part obeys
``p2(v, s2) = p1(v, -s2)`` and is independent of the amplitude part.  The
syndrome marginal is ``p(s1) = theta3(pi s1, e^{-d pi sigma^2})`` and the
central Gaussian term ``p_lim`` approximates ``p1`` up to a gap bounded by
``theta2(0, e^{-d pi / sigma^2}) / (sigma sqrt(d))``.

Everything here is a pure function of its arguments; sampling takes an
explicit random generator so callers control reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .theta import lattice_theta, log_lattice_theta, theta2

LN2 = math.log(2.0)


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division; fine for qudit-sized moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ChannelSpec:
    """Square GKP qudit channel: prime dimension ``d``, displacement spread ``sigma``."""

    d: int
    sigma: float

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"qudit dimension must be prime, got {self.d}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SyndromeSample:
    """One corrected mode: amplitude error power ``u`` and analog syndrome ``s1``."""

    u: int
    s1: float

    def __post_init__(self):
        if not 0 <= self.u:
            raise ValueError(f"u must be a canonical residue, got {self.u}")
        if not -0.5 <= self.s1 < 0.5:
            raise ValueError(f"s1 must lie in [-1/2, 1/2), got {self.s1}")


@dataclass(frozen=True)
class FiniteEnergyParams:
    """Envelope widths of finite-energy data/ancilla modes on top of base noise."""

    sigma0: float
    delta_data: float = 0.0
    delta_anc: float = 0.0

    def __post_init__(self):
        if self.sigma0 < 0 or self.delta_data < 0 or self.delta_anc < 0:
            raise ValueError("finite-energy parameters must be non-negative")


def centered_residues(d: int) -> np.ndarray:
    """Centred representatives of Z_d: [-(d-1)/2, (d-1)/2] for odd d, {0, 1} for d = 2."""
    r = np.arange(d)
    if d == 2:
        return r
    return np.where(r <= (d - 1) // 2, r, r - d)


def _check_syndrome(s1):
    s = np.asarray(s1, dtype=float)
    if np.any(s < -0.5) or np.any(s >= 0.5):
        raise ValueError(f"syndrome must lie in [-1/2, 1/2), got {s1}")
    return s


def wrap_syndrome(s):
    """Wrap any real to the canonical syndrome interval [-1/2, 1/2)."""
    s = np.asarray(s, dtype=float)
    out = s - np.floor(s + 0.5)
    return float(out) if out.ndim == 0 else out


def p_joint(spec: ChannelSpec, u: int, s1) -> float:
    """Joint density p1(u, s1) of amplitude error ``u`` and syndrome ``s1``.

    ``u`` is canonicalised mod d; ``s1`` must lie in [-1/2, 1/2).  Accepts an
    array of syndromes and then returns an array.
    """
    s = _check_syndrome(s1)
    d = spec.d
    w = (centered_residues(d)[u % d] + s) / d
    out = lattice_theta(w, spec.sigma ** 2 / d) / d
    return float(out) if np.ndim(out) == 0 else out


def p_joint_theta_series(spec: ChannelSpec, u: int, s1) -> float:
    """p1 via the raw theta series (1/d) theta3(pi w, e^{-pi sigma^2/d}).

    One leg of the Poisson pair; kept independent of the dual Gaussian sum so
    the two routes can be checked against each other.
    """
    from .theta import _series_theta3  # series route on purpose

    s = _check_syndrome(s1)
    d = spec.d
    w = (centered_residues(d)[u % d] + s) / d
    q = math.exp(-math.pi * spec.sigma ** 2 / d)
    out = _series_theta3(math.pi * np.asarray(w, dtype=float), q, 1e-16) / d
    return float(out) if np.ndim(s) == 0 else out


def p_joint_gauss_sum(spec: ChannelSpec, u: int, s1, l_window: int = 20) -> float:
    """p1 via the direct Gaussian sum truncated at |l| <= l_window.

    The other leg of the Poisson pair and the brute-force oracle form; for
    sigma <= 2 the omitted tail is far below double precision.
    """
    s = _check_syndrome(s1)
    d = spec.d
    w = (centered_residues(d)[u % d] + np.asarray(s, dtype=float)) / d
    ls = np.arange(-l_window, l_window + 1)
    total = np.exp(-(math.pi * d / spec.sigma ** 2)
                   * (ls.reshape((-1,) + (1,) * np.ndim(w)) + w) ** 2).sum(axis=0)
    out = total / (spec.sigma * math.sqrt(d))
    return float(out) if np.ndim(s) == 0 else out


def p_joint_phase(spec: ChannelSpec, v: int, s2) -> float:
    """Phase-side joint density p2(v, s2) = p1(v, -s2)."""
    _check_syndrome(s2)
    return p_joint(spec, v, wrap_syndrome(-np.asarray(s2, dtype=float)))


def p_syndrome(spec: ChannelSpec, s1) -> float:
    """Syndrome marginal p(s1) = theta3(pi s1, e^{-d pi sigma^2}) = sum_u p1(u, s1)."""
    s = _check_syndrome(s1)
    out = lattice_theta(s, spec.d * spec.sigma ** 2)
    return float(out) if np.ndim(out) == 0 else out


def p_cond(spec: ChannelSpec, u: int, s1) -> float:
    """Conditional error law p(u | s1) = p1(u, s1) / p(s1); sums to 1 over u."""
    return p_joint(spec, u, s1) / p_syndrome(spec, s1)


def p_lim(spec: ChannelSpec, u: int, s1) -> float:
    """Central-term approximation (1/(sigma sqrt d)) exp(-(pi d/sigma^2) w^2)."""
    s = _check_syndrome(s1)
    d = spec.d
    w = (centered_residues(d)[u % d] + s) / d
    out = np.exp(-(math.pi * d / spec.sigma ** 2) * w * w) / (spec.sigma * math.sqrt(d))
    return float(out) if np.ndim(out) == 0 else out


def lim_gap_bound(spec: ChannelSpec) -> float:
    """Uniform bound on |p1 - p_lim|: theta2(0, e^{-d pi / sigma^2}) / (sigma sqrt d)."""
    q = math.exp(-spec.d * math.pi / spec.sigma ** 2)
    return theta2(0.0, q) / (spec.sigma * math.sqrt(spec.d))


def sample_batch(spec: ChannelSpec, rng: np.random.Generator, shape):
    """Draw i.i.d. (u, s1) pairs from p1.

    The physical shift e1 has e1 * sqrt(2 pi / d) ~ N(0, sigma^2); rounding to
    the nearest integer gives s1 = e1 - round(e1) in [-1/2, 1/2) and the
    amplitude error u = round(e1) mod d.
    """
    std = spec.sigma * math.sqrt(spec.d / (2.0 * math.pi))
    e = rng.normal(0.0, std, size=shape)
    k = np.floor(e + 0.5)
    s = e - k
    u = (k.astype(np.int64)) % spec.d
    return u, s


def sample(spec: ChannelSpec, rng: np.random.Generator) -> SyndromeSample:
    """Draw a single SyndromeSample from p1."""
    u, s = sample_batch(spec, rng, ())
    return SyndromeSample(int(u), float(s))


def effective_sigma(fe: FiniteEnergyParams) -> float:
    """Total effective spread sqrt(sigma0^2 + sigma_data^2 + 2 sigma_anc^2).

    Each envelope width Delta contributes an incoherent spread
    sigma_x = tanh(Delta_x^2 / 2); data modes count once, ancilla modes twice
    (teleportation-based syndrome extraction uses two ancilla quadratures).
    """
    sd = math.tanh(fe.delta_data ** 2 / 2.0)
    sa = math.tanh(fe.delta_anc ** 2 / 2.0)
    return math.sqrt(fe.sigma0 ** 2 + sd ** 2 + 2.0 * sa ** 2)


def p_joint_finite(spec: ChannelSpec, fe: FiniteEnergyParams, u: int, s1) -> float:
    """Ancilla-smeared joint law (1/d) theta3(pi w, e^{-pi (sigma^2 + 2 sigma_anc^2)/d}).

    ``spec.sigma`` is the pre-smearing noise on the data mode (compose data
    envelopes into it via :func:`effective_sigma` if needed); noisy ancillas
    blur the syndrome record, which is equivalent to widening the nome.
    """
    s = _check_syndrome(s1)
    d = spec.d
    sa = math.tanh(fe.delta_anc ** 2 / 2.0)
    w = (centered_residues(d)[u % d] + s) / d
    out = lattice_theta(w, (spec.sigma ** 2 + 2.0 * sa ** 2) / d) / d
    return float(out) if np.ndim(out) == 0 else out


# --- vectorised log-density and likelihood-ratio kernels -------------------

def log_p_joint_table(spec: ChannelSpec, s) -> np.ndarray:
    """log p1(r, s) for every residue r = 0..d-1; shape s.shape + (d,)."""
    s = np.asarray(s, dtype=float)
    d = spec.d
    w = (centered_residues(d) + s[..., None]) / d
    return log_lattice_theta(w, spec.sigma ** 2 / d) - math.log(d)


def channel_llr_table(spec: ChannelSpec, y, s) -> np.ndarray:
    """Per-symbol LLR vectors L[..., a] = log W(y,s | 0) - log W(y,s | a).

    ``W((x+u, s) | x) = p1(u, s)`` is the amplitude-side channel, so the
    belief about input symbol a given output (y, s) is p1(y - a, s).  The
    a = 0 entry is exactly zero.  Works on arrays of (y, s) pairs.
    """
    y = np.asarray(y)
    logp = log_p_joint_table(spec, s)
    d = spec.d
    idx = (y[..., None] - np.arange(d)) % d
    shifted = np.take_along_axis(logp, idx, axis=-1)
    return shifted[..., :1] - shifted


def channel_llr_table_phase(spec: ChannelSpec, v, s2) -> np.ndarray:
    """Phase-side LLR vectors; uses p2(v, s2) = p1(v, -s2)."""
    return channel_llr_table(spec, v, wrap_syndrome(-np.asarray(s2, dtype=float)))


def residue_likelihood_table(spec: ChannelSpec, s) -> np.ndarray:
    """Max-normalised likelihoods p1(r, s) over residues r; shape s.shape + (d,).

    The likelihood-domain counterpart of :func:`log_p_joint_table` for the
    Monte-Carlo construction hot path: entries below the underflow floor
    flush to zero, which is the saturating "certainly impossible" convention.
    """
    s = np.asarray(s, dtype=float)
    d = spec.d
    a = spec.sigma ** 2 / d
    w = (centered_residues(d) + s[..., None]) / d
    if a >= 1.0:
        p = lattice_theta(w, a)
        return p / p.max(axis=-1, keepdims=True)
    c = w - np.floor(w + 0.5)
    e = (math.pi / a) * c * c
    m = e.min(axis=-1, keepdims=True)
    kmax = 1 + math.ceil(0.5 + math.sqrt(0.25 + 13.0 * a))
    p = np.exp(m - e)
    for k in range(1, kmax + 1):
        p += np.exp(m - (math.pi / a) * (c + k) ** 2)
        p += np.exp(m - (math.pi / a) * (c - k) ** 2)
    return p / p.max(axis=-1, keepdims=True)


def likelihood_table(spec: ChannelSpec, y, s) -> np.ndarray:
    """Normalised likelihood vectors E[..., a] ~ p1(y - a, s) per observation."""
    y = np.asarray(y)
    p = residue_likelihood_table(spec, s)
    idx = (y[..., None] - np.arange(spec.d)) % spec.d
    return np.take_along_axis(p, idx, axis=-1)


def likelihood_table_phase(spec: ChannelSpec, v, s2) -> np.ndarray:
    """Phase-side normalised likelihoods; uses p2(v, s2) = p1(v, -s2)."""
    return likelihood_table(spec, v, wrap_syndrome(-np.asarray(s2, dtype=float)))
