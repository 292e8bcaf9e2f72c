"""Numerically robust Jacobi theta functions.

Implements the two one-variable theta series used throughout the package,

    theta2(u, q) = 2 q^{1/4} sum_{n>=0} (-1)^n q^{n(n+1)} cos((2n+1) u),
    theta3(u, q) = 1 + 2 sum_{n>=1} q^{n^2}   cos(2 n u),

for real argument ``u`` and real or complex nome ``|q| < 1``, plus a
modular-duality self check for the square-lattice value theta3(0, q)^2.

Series are truncated once the next term falls below ``tol`` relative to the
running partial sum (absolute floor ``tol`` when the sum is near zero); the
terms decay like ``q^{n^2}`` so only O(sqrt(log(1/tol) / log(1/|q|))) terms
are needed.  For real nomes extremely close to 1 (where the raw series both
converges slowly and cancels catastrophically away from u = 0) the series is
replaced by its modular image, the all-positive Gaussian sum

    theta3(pi*w, e^{-pi a}) = a^{-1/2} sum_l exp(-pi (l + w)^2 / a),

which converges fast exactly where the series does not.  ``lattice_theta``
and ``log_lattice_theta`` expose this dual-route kernel directly; the channel
model is built on them.
"""

from __future__ import annotations

import math

import numpy as np

# Real nomes above this switch theta3 to the modular (Gaussian-sum) route.
MODULAR_NOME_CUTOFF = math.exp(-math.pi / 100)

# Hard cap on series length; unreachable below the modular cutoff.
_MAX_TERMS = 200_000


def _series_theta3(u, q, tol):
    """Direct theta3 series; u scalar/array, q scalar (real or complex)."""
    acc = np.ones_like(np.asarray(u, dtype=float)) * (1.0 + 0j if np.iscomplexobj(np.asarray(q)) else 1.0)
    qn = 1.0 + 0j if isinstance(q, complex) else 1.0
    for n in range(1, _MAX_TERMS):
        qn = q ** (n * n)
        term = 2.0 * qn * np.cos(2.0 * n * np.asarray(u, dtype=float))
        acc = acc + term
        if np.max(np.abs(term)) < tol * max(1.0, float(np.max(np.abs(acc)))):
            return acc
    raise ArithmeticError(f"theta3 series did not converge for |q|={abs(q)}")


def lattice_theta(w, a):
    """theta3(pi*w, e^{-pi*a}) for real ``w`` (scalar or array) and ``a`` > 0.

    Uses the direct series when a >= 1 (nome <= e^{-pi}, two or three
    dominant terms, no cancellation) and the Gaussian sum otherwise.  The
    Gaussian sum has strictly positive terms, so both routes deliver full
    relative precision over their whole range.
    """
    if a <= 0:
        raise ValueError(f"lattice parameter a must be positive, got {a}")
    w = np.asarray(w, dtype=float)
    if a >= 1.0:
        out = _series_theta3(math.pi * w, math.exp(-math.pi * a), 1e-16)
        return out if out.ndim else float(out)
    return np.exp(log_lattice_theta(w, a))


def log_lattice_theta(w, a):
    """log of ``lattice_theta(w, a)``, stable for arbitrarily small ``a``.

    For small ``a`` the value spans hundreds of orders of magnitude across
    w in [-1/2, 1/2]; the log form is what likelihood ratios consume.
    """
    if a <= 0:
        raise ValueError(f"lattice parameter a must be positive, got {a}")
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if a >= 1.0:
        out = np.log(_series_theta3(math.pi * w, math.exp(-math.pi * a), 1e-16))
    else:
        # centre each w on its nearest integer; the sum is shift invariant
        c = w - np.floor(w + 0.5)
        m = (math.pi / a) * c * c
        # neighbour-term decay exp(-pi*k(k-1)/a) for |c| <= 1/2
        kmax = 1 + math.ceil(0.5 + math.sqrt(0.25 + 13.0 * a))
        s = np.ones_like(c)
        for k in range(1, kmax + 1):
            s += np.exp(m - (math.pi / a) * (c + k) ** 2)
            s += np.exp(m - (math.pi / a) * (c - k) ** 2)
        out = -m + np.log(s) - 0.5 * math.log(a)
    return float(out[0]) if scalar else out


def theta3(u, q, tol: float = 1e-15):
    """Jacobi theta3(u, q) = 1 + 2 sum_{n>=1} q^{n^2} cos(2nu).

    Parameters
    ----------
    u : float or ndarray
        Real argument, radians.
    q : float or complex
        Nome, |q| < 1 strictly.
    tol : float
        Relative truncation threshold for the series.

    Returns
    -------
    float, complex or ndarray
        Real output for real nome; complex for complex nome.

    Raises
    ------
    ValueError
        If |q| >= 1.
    """
    if abs(q) >= 1.0:
        raise ValueError(f"nome must satisfy |q| < 1, got |q| = {abs(q)}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    qc = complex(q)
    if qc.imag != 0.0:
        out = _series_theta3(u, qc, tol)
        return complex(out) if np.asarray(u).ndim == 0 else out
    qr = qc.real
    if qr == 0.0:
        out = np.ones_like(np.asarray(u, dtype=float))
        return float(out) if out.ndim == 0 else out
    if qr < 0.0 or qr < MODULAR_NOME_CUTOFF:
        out = _series_theta3(u, qr, tol)
        return float(out) if out.ndim == 0 else out
    # nome close to 1: modular transform, sum in the dual (Gaussian) domain
    a = -math.log(qr) / math.pi
    out = lattice_theta(np.asarray(u, dtype=float) / math.pi, a)
    return out


def theta2(u, q, tol: float = 1e-15):
    """Jacobi theta2(u, q) = 2 q^{1/4} sum_{n>=0} (-1)^n q^{n(n+1)} cos((2n+1)u).

    Real nome only, 0 <= q < 1.  Used at u = 0 for the central-term gap bound
    of the channel model, where the nome is tiny.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"theta2 requires 0 <= q < 1, got {q}")
    if q == 0.0:
        out = np.zeros_like(np.asarray(u, dtype=float))
        return float(out) if out.ndim == 0 else out
    u = np.asarray(u, dtype=float)
    acc = np.cos(u).astype(float)
    for n in range(1, _MAX_TERMS):
        term = (-1.0) ** n * q ** (n * (n + 1)) * np.cos((2 * n + 1) * u)
        acc = acc + term
        if np.max(np.abs(term)) < tol * max(1.0, float(np.max(np.abs(acc)))):
            break
    else:
        raise ArithmeticError(f"theta2 series did not converge for q={q}")
    out = 2.0 * q ** 0.25 * acc
    return float(out) if out.ndim == 0 else out


def duality_residual(t: float) -> float:
    """|theta3(e^{-pi t})^2 - (1/t) theta3(e^{-pi/t})^2| for t > 0.

    The squared form of the modular identity for the Z^2 lattice theta; both
    sides are evaluated independently through the raw series, so a small
    residual is a genuine self test of the implementation.  The identity is
    evaluated at max(t, 1/t), making the t <-> 1/t symmetry exact.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    t = max(t, 1.0 / t)
    lhs = _series_theta3(0.0, math.exp(-math.pi * t), 1e-16) ** 2
    rhs = _series_theta3(0.0, math.exp(-math.pi / t), 1e-16) ** 2 / t
    return float(np.abs(lhs - rhs))
