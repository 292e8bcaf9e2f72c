"""Pure-loss capacity machinery: restricted theta sums and the infidelity bound.

Concatenating an [[N, K]]_d stabilizer code (d prime, d = 3 mod 4) onto N
square GKP qudits yields a lattice whose dual-theta sum controls the
transpose-recovery infidelity against loss of transmittance eta.  The
computable pieces implemented here:

* ``count_self_orthogonal`` -- the number of nonzero Hermitian self-orthogonal
  vectors in GF(d^2)^N, (d^{2N} + (d-1)(-d)^N)/d - 1, in exact integers.

* ``s_g`` -- the congruence-restricted lattice sum over z in Z^{2N} with
  |z|^2 = 0 mod d of e^{-pi g |z|^2 / d}, evaluated through the root-of-unity
  filter as (1/d) sum_j theta3(e^{-pi g/d} w^j)^{2N} with w = e^{2 pi i/d};
  the j and d-j nomes are conjugate, so the imaginary parts must cancel and
  their residue is asserted to vanish.

* ``infidelity_bound_log`` -- the natural log of the 4*epsilon upper bound

      (d^{K/N} theta3(e^{-pi d (1-eta)/eta})^2 (1-eta)/eta)^N
      + (1 + 1.1/d^{N-1}) (1 + d (1 - 0.9/d)^{N/2}) theta3(e^{-pi d eta/(1-eta)})^{2N}
      - 1,

  evaluated entirely in log scale with N supplied as log(N): the interesting
  regime has N ~ e^{d eta/(1-eta)}, far beyond anything materialisable, so
  integer N never exists as a concrete value.  The constants 1.1, 4.1, 0.9
  are fixed bound constants, not tunables.

* ``capacity_sequence`` -- the explicit sequence log N = d eta/(1-eta) with
  the rate cap d^{K/N} = (eta/(1-eta)) (1 - 4.1 e^{-pi d (1-eta)/eta}) (1 - N^{-1/2}),
  whose rates climb to log2(eta/(1-eta)) while the bound falls.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .channel import is_prime
from .theta import theta3


@dataclass(frozen=True)
class LossParams:
    """Pure-loss channel with transmittance eta in (0, 1)."""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"transmittance must lie in (0, 1), got {self.eta}")

    @property
    def g(self) -> float:
        """Transpose-recovery exponent eta / (1 - eta)."""
        return self.eta / (1.0 - self.eta)

    @property
    def g_dual(self) -> float:
        """Dual-side exponent (1 - eta) / eta."""
        return (1.0 - self.eta) / self.eta


@dataclass(frozen=True)
class SequencePoint:
    """One member of the capacity-approaching sequence (all N-scale values in logs)."""

    d: int
    log_n: float
    k_over_n: float
    rate_bits: float
    log_eps_bound: float

    def __post_init__(self):
        if self.d % 4 != 3 or not is_prime(self.d):
            raise ValueError(f"sequence requires prime d = 3 mod 4, got {self.d}")


def count_self_orthogonal(d: int, n: int) -> int:
    """Nonzero Hermitian self-orthogonal vectors in GF(d^2)^n: (d^{2n}+(d-1)(-d)^n)/d - 1."""
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if 2 * n * math.log10(d) > 100_000:
        raise ValueError(f"d^(2n) with d={d}, n={n} is beyond any sensible size")
    v = d ** (2 * n) + (d - 1) * (-d) ** n
    if v % d:
        raise ArithmeticError("count formula lost integrality; d must divide the bracket")
    return v // d - 1


def s_g(g: float, d: int, n: int) -> float:
    """Restricted lattice sum sum_{z in Z^{2n}, |z|^2 = 0 mod d} e^{-pi g |z|^2 / d}.

    Uses the root-of-unity filter (1/d) sum_j theta3(q w^j)^{2n} with
    q = e^{-pi g / d}; raises if the paired imaginary parts fail to cancel.
    """
    if g <= 0:
        raise ValueError(f"g must be positive, got {g}")
    if not is_prime(d) or d % 2 == 0:
        raise ValueError(f"s_g needs an odd prime d, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q = math.exp(-math.pi * g / d)
    acc = complex(theta3(0.0, q) ** (2 * n))
    for j in range(1, d):
        qj = q * cmath.exp(2j * math.pi * j / d)
        acc += theta3(0.0, qj) ** (2 * n)
    val = acc.real / d
    resid = abs(acc.imag) / d
    if resid > 1e-10 * max(1.0, abs(val)):
        raise ArithmeticError(f"imaginary residue {resid} did not cancel in s_g")
    return float(val)


def _ln_theta3_0(q: float) -> float:
    """log theta3(0, q) for 0 <= q < 1, accurate down to underflowing q."""
    if q < 1e-4:
        return math.log1p(2.0 * q * (1.0 + q ** 3 + q ** 8))
    return math.log(theta3(0.0, q))


def _n_times(log_n: float, x: float) -> float:
    """N * x for N = e^{log_n}, saturating to +-inf instead of overflowing."""
    if x == 0.0:
        return 0.0
    ln_mag = log_n + math.log(abs(x))
    if ln_mag > 709.0:
        return math.inf if x > 0 else -math.inf
    return math.copysign(math.exp(ln_mag), x)


def infidelity_bound_log(d: int, log_n: float, k_over_n: float, eta: float) -> float:
    """Natural log of the 4*epsilon transpose-recovery bound after pure loss.

    ``log_n`` is ln(N) (N need not be an integer at this scale) and
    ``k_over_n`` the rate ratio K/N; both enter only through N * (...) terms,
    which are formed in log scale.  The trailing "- 1" cancels against the
    second summand's 1 + tiny structure and is handled by expm1.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"transmittance must lie in (0, 1), got {eta}")
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    if k_over_n > 1.0:
        raise ValueError("K cannot exceed N")
    p = LossParams(eta)
    ln_d = math.log(d)

    bracket = k_over_n * ln_d + 2.0 * _ln_theta3_0(math.exp(-math.pi * d * p.g_dual)) \
        + math.log(p.g_dual)
    log_term1 = _n_times(log_n, bracket)

    t_a = math.log1p(1.1 * math.exp(min(ln_d - _n_times(log_n, ln_d), 0.0)))
    half_pow = _n_times(log_n, 0.5 * math.log1p(-0.9 / d))  # (N/2) ln(1 - 0.9/d)
    t_b = math.log1p(d * math.exp(half_pow)) if half_pow > -700.0 else 0.0
    t_c = 2.0 * _n_times(log_n, _ln_theta3_0(math.exp(-math.pi * d * p.g)))
    ln_term2 = t_a + t_b + t_c

    log_term2_m1 = math.log(math.expm1(ln_term2)) if ln_term2 > 0.0 else -math.inf
    return float(np.logaddexp(log_term1, log_term2_m1))


def capacity_sequence(eta: float, d_list) -> list[SequencePoint]:
    """Evaluate the explicit capacity-approaching sequence at each prime d = 3 mod 4.

    Sets log N = d eta/(1-eta), caps the rate by
    d^{K/N} = (eta/(1-eta)) (1 - 4.1 e^{-pi d (1-eta)/eta}) (1 - N^{-1/2})
    (the residual factor uses delta = 1/2), and evaluates the infidelity
    bound at that cap.  ``log_eps_bound`` is the log of the epsilon bound,
    i.e. the 4*epsilon bound minus log 4.
    """
    p = LossParams(eta)
    points = []
    for d in d_list:
        if d % 4 != 3 or not is_prime(d):
            raise ValueError(f"sequence requires prime d = 3 mod 4, got {d}")
        log_n = d * p.g
        shrink = 4.1 * math.exp(-math.pi * d * p.g_dual)
        if shrink >= 1.0:
            raise ValueError(f"d = {d} is too small for the bound constants at eta = {eta}")
        cap_ln = math.log(p.g) + math.log1p(-shrink) + math.log1p(-math.exp(-0.5 * log_n))
        k_over_n = cap_ln / math.log(d)
        rate_bits = cap_ln / math.log(2.0)
        log_eps = infidelity_bound_log(d, log_n, k_over_n, eta) - math.log(4.0)
        points.append(SequencePoint(d=d, log_n=log_n, k_over_n=k_over_n,
                                    rate_bits=rate_bits, log_eps_bound=log_eps))
    return points
