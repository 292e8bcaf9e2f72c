"""Prime-field polar transform, d-ary LLR recursions, and successive cancellation.

The encoder applies the kernel [[1, alpha], [0, 1]] (entries mod a prime d,
alpha != 0) recursively over N = 2^n positions: one butterfly unit maps
(u1, u2) -> (u1 + alpha*u2, u2).  Decoding traverses the same tree with two
vector operations on length-d log-likelihood-ratio vectors
L[i] = log(p(x=0)/p(x=i)):

    f(L1, L2)[i]    = log sum_j e^{-(L1[aj] + L2[j])}
                    - log sum_j e^{-(L1[aj + i] + L2[j])}       (check node)
    g(L1, L2, u)[i] = L2[i] - L1[u] + L1[u + alpha*i]           (variable node)

with all index arithmetic mod d.  Certainty is carried by a large finite
sentinel (``LLR_INF``) with saturating arithmetic, which avoids NaNs from
inf - inf while keeping "impossible symbol" semantics.

The phase-basis transform G^{-T} = [[1, 0], [-alpha, 1]]^{(x) n} is realised
by reversing the position order, negating alpha and reusing the same
machinery (the identity G^{-T} = R (kernel(-alpha))^{(x) n} R with R the
index reversal; see ``dense_phase_transform`` for the dense-matrix check).

All operations accept leading batch axes; a batch of independent decodes is a
single vectorised tree traversal since the control flow is data independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import is_prime

#: Sentinel magnitude representing a certainly-impossible symbol.
LLR_INF = 1e300

#: Cap on -L/2 exponents when mapping LLRs to Bhattacharyya summands.
_EXP_CAP = 60.0


class PrimeField:
    """Arithmetic over F_d for prime d."""

    def __init__(self, d: int):
        if not is_prime(d):
            raise ValueError(f"field order must be prime, got {d}")
        self.d = d

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.d

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.d

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.d

    def neg(self, a: int) -> int:
        return (-a) % self.d

    def inv(self, a: int) -> int:
        """Multiplicative inverse via a^(d-2) mod d."""
        if a % self.d == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return pow(a % self.d, self.d - 2, self.d)


@dataclass
class PolarCodeSpec:
    """Block-size exponent n (N = 2^n), prime d, kernel multiplier alpha, frozen structure."""

    n: int
    d: int
    alpha: int
    frozen_mask: np.ndarray = None
    frozen_values: np.ndarray = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not is_prime(self.d):
            raise ValueError(f"d must be prime, got {self.d}")
        if self.alpha % self.d == 0:
            raise ValueError("alpha must be nonzero in the field")
        self.alpha %= self.d
        N = self.N
        if self.frozen_mask is None:
            self.frozen_mask = np.zeros(N, dtype=bool)
        self.frozen_mask = np.asarray(self.frozen_mask, dtype=bool)
        if self.frozen_mask.shape != (N,):
            raise ValueError(f"frozen_mask must have length {N}")
        if self.frozen_values is None:
            self.frozen_values = np.zeros(N, dtype=np.int64)
        self.frozen_values = np.asarray(self.frozen_values, dtype=np.int64) % self.d
        if self.frozen_values.shape != (N,):
            raise ValueError(f"frozen_values must have length {N}")

    @property
    def N(self) -> int:
        return 1 << self.n


# --- encoder ----------------------------------------------------------------

def _butterfly(u, d: int, alpha: int, inverse: bool = False) -> np.ndarray:
    x = np.ascontiguousarray(np.asarray(u, dtype=np.int64) % d)
    N = x.shape[-1]
    if N & (N - 1) or N == 0:
        raise ValueError(f"length must be a power of two, got {N}")
    sizes = [1 << k for k in range(1, N.bit_length())]
    for s in (reversed(sizes) if inverse else sizes):
        h = s // 2
        v = x.reshape(x.shape[:-1] + (N // s, s))
        if inverse:
            v[..., :h] = (v[..., :h] - alpha * v[..., h:]) % d
        else:
            v[..., :h] = (v[..., :h] + alpha * v[..., h:]) % d
    return x


def polar_encode(u, code: PolarCodeSpec) -> np.ndarray:
    """x = G_N u with G_N = [[1, alpha], [0, 1]]^{(x) n}; O(N log N) field ops."""
    return _butterfly(u, code.d, code.alpha)


def polar_encode_inverse(x, code: PolarCodeSpec) -> np.ndarray:
    """u = G_N^{-1} x; inverse butterfly, unit (x1, x2) -> (x1 - alpha*x2, x2)."""
    return _butterfly(x, code.d, code.alpha, inverse=True)


def phase_transform(u, code: PolarCodeSpec) -> np.ndarray:
    """x = G_N^{-T} u, realised as reverse -> kernel(-alpha) -> reverse."""
    rev = np.asarray(u)[..., ::-1]
    return _butterfly(rev, code.d, (-code.alpha) % code.d)[..., ::-1]


def phase_transform_inverse(x, code: PolarCodeSpec) -> np.ndarray:
    """u = G_N^T x, the inverse of :func:`phase_transform`."""
    rev = np.asarray(x)[..., ::-1]
    return _butterfly(rev, code.d, (-code.alpha) % code.d, inverse=True)[..., ::-1]


def dense_transform(code: PolarCodeSpec) -> np.ndarray:
    """Dense G_N mod d (test oracle; N <= 16)."""
    if code.N > 16:
        raise ValueError("dense transform is an oracle for N <= 16 only")
    g2 = np.array([[1, code.alpha], [0, 1]], dtype=np.int64)
    g = np.array([[1]], dtype=np.int64)
    for _ in range(code.n):
        g = np.kron(g, g2) % code.d
    return g


def dense_phase_transform(code: PolarCodeSpec) -> np.ndarray:
    """Dense G_N^{-T} = [[1, 0], [-alpha, 1]]^{(x) n} mod d (test oracle; N <= 16)."""
    if code.N > 16:
        raise ValueError("dense transform is an oracle for N <= 16 only")
    g2 = np.array([[1, 0], [(-code.alpha) % code.d, 1]], dtype=np.int64)
    g = np.array([[1]], dtype=np.int64)
    for _ in range(code.n):
        g = np.kron(g, g2) % code.d
    return g


# --- LLR-domain node operations ----------------------------------------------

@lru_cache(maxsize=None)
def _f_index(d: int, alpha: int) -> np.ndarray:
    i = np.arange(d)[:, None]
    j = np.arange(d)[None, :]
    return (alpha * j + i) % d


def _saturate(out: np.ndarray) -> np.ndarray:
    out = np.nan_to_num(out, nan=0.0, posinf=LLR_INF, neginf=-LLR_INF)
    np.clip(out, -LLR_INF, LLR_INF, out=out)
    out[..., 0] = 0.0
    return out


def f_check(L1, L2, alpha: int) -> np.ndarray:
    """Check-node update on LLR vectors (last axis = d); batch axes allowed.

    Evaluated through normalised probability weights e^{min(L) - L} so the
    log-sum-exp is stable for any mix of finite and sentinel entries; the
    normalising shifts cancel exactly in the output ratio.
    """
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    d = L1.shape[-1]
    idx = _f_index(d, alpha % d)
    e1 = np.exp(L1.min(axis=-1, keepdims=True) - L1)
    e2 = np.exp(L2.min(axis=-1, keepdims=True) - L2)
    s = np.empty(np.broadcast_shapes(L1.shape, L2.shape), dtype=float)
    for i in range(d):
        s[..., i] = np.einsum("...j,...j->...", e1[..., idx[i]], e2)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(s)
        out = logs[..., :1] - logs
    return _saturate(out)


def g_variable(L1, L2, u, alpha: int) -> np.ndarray:
    """Variable-node update g[i] = L2[i] - L1[u] + L1[u + alpha*i] (indices mod d)."""
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    d = L1.shape[-1]
    u = np.asarray(u, dtype=np.int64) % d
    ai = (alpha * np.arange(d)) % d
    gi = (u[..., None] + ai) % d
    lu = np.take_along_axis(L1, u[..., None], axis=-1)
    lg = np.take_along_axis(L1, gi, axis=-1)
    return _saturate(L2 - lu + lg)


def hard_decision(L) -> int:
    """Most likely symbol: 0 when min L >= 0, else argmin (ties to lowest index)."""
    L = np.asarray(L, dtype=float)
    return 0 if L.min() >= 0.0 else int(L.argmin())


def hard_decision_batch(L) -> np.ndarray:
    L = np.asarray(L, dtype=float)
    return np.where(L.min(axis=-1) >= 0.0, 0, L.argmin(axis=-1)).astype(np.int64)


# --- successive cancellation ---------------------------------------------------

def sc_decode_batch(llrs, code: PolarCodeSpec, genie=None):
    """SC-decode a batch of blocks.

    Parameters
    ----------
    llrs : ndarray, shape (B, N, d)
        Channel LLR vectors per block and position.
    code : PolarCodeSpec
        Frozen positions decide to their frozen values; information positions
        decide by :func:`hard_decision`.
    genie : ndarray of int, shape (B, N), optional
        When given, every leaf decision is overridden by the supplied value
        (construction / genie-aided runs); leaf LLRs are still reported.

    Returns
    -------
    (u_hat, leaf_llrs) : (B, N) int ndarray, (B, N, d) float ndarray

    The tree recursion depth is n = log2 N, so plain recursion is safe for
    any practical block length.
    """
    llrs = np.asarray(llrs, dtype=float)
    if llrs.ndim != 3 or llrs.shape[1] != code.N or llrs.shape[2] != code.d:
        raise ValueError(f"llrs must have shape (B, {code.N}, {code.d})")
    B = llrs.shape[0]
    alpha, d = code.alpha, code.d
    decisions = np.zeros((B, code.N), dtype=np.int64)
    leaf_llrs = np.empty_like(llrs)

    def rec(L, lo):
        m = L.shape[1]
        if m == 1:
            leaf_llrs[:, lo, :] = L[:, 0, :]
            if genie is not None:
                dec = np.asarray(genie[:, lo], dtype=np.int64) % d
            elif code.frozen_mask[lo]:
                dec = np.full(B, code.frozen_values[lo], dtype=np.int64)
            else:
                dec = hard_decision_batch(L[:, 0, :])
            decisions[:, lo] = dec
            return dec[:, None]
        h = m // 2
        a_hat = rec(f_check(L[:, :h], L[:, h:], alpha), lo)
        b_hat = rec(g_variable(L[:, :h], L[:, h:], a_hat, alpha), lo + h)
        return np.concatenate(((a_hat + alpha * b_hat) % d, b_hat), axis=1)

    rec(llrs, 0)
    return decisions, leaf_llrs


def sc_decode(channel_llrs, code: PolarCodeSpec, genie=None):
    """Single-block SC decode; see :func:`sc_decode_batch`."""
    llrs = np.asarray(channel_llrs, dtype=float)[None]
    g = None if genie is None else np.asarray(genie, dtype=np.int64)[None]
    u_hat, leaf = sc_decode_batch(llrs, code, genie=g)
    return u_hat[0], leaf[0]


def sc_decode_phase_batch(llrs, code: PolarCodeSpec, genie=None):
    """SC decode against the phase-basis transform G_N^{-T}.

    Reverses the position order, negates alpha, runs the plain decoder and
    maps leaves back, so outputs are indexed like the amplitude side.  The
    frozen mask/values of ``code`` are interpreted in original positions.
    """
    rev = PolarCodeSpec(code.n, code.d, (-code.alpha) % code.d,
                        frozen_mask=code.frozen_mask[::-1].copy(),
                        frozen_values=code.frozen_values[::-1].copy())
    g = None if genie is None else np.asarray(genie, dtype=np.int64)[:, ::-1]
    u_hat, leaf = sc_decode_batch(np.asarray(llrs, dtype=float)[:, ::-1], rev, genie=g)
    return u_hat[:, ::-1], leaf[:, ::-1]


def genie_zero_leaf_llrs(llrs, alpha: int) -> np.ndarray:
    """Leaf LLRs of a genie-aided pass with all-true-zero decisions.

    With every decision pinned to 0 the g update degenerates to
    g[i] = L2[i] + L1[alpha*i] and no re-encoding is needed, which makes the
    whole pass a fixed pipeline of f/g array operations.  This is the hot
    path of Monte-Carlo construction; it agrees with
    ``sc_decode_batch(..., genie=zeros)`` exactly.
    """
    llrs = np.asarray(llrs, dtype=float)
    B, N, d = llrs.shape
    out = np.empty_like(llrs)
    gidx = (alpha * np.arange(d)) % d

    def rec(L, lo):
        m = L.shape[1]
        if m == 1:
            out[:, lo, :] = L[:, 0, :]
            return
        h = m // 2
        rec(f_check(L[:, :h], L[:, h:], alpha), lo)
        rec(_saturate(L[:, h:] + L[:, :h][..., gidx]), lo + h)

    rec(llrs, 0)
    return out


def bhattacharyya_summand(leaf_llrs: np.ndarray) -> np.ndarray:
    """Per-trial Bhattacharyya contribution (1/(d-1)) sum_{a!=0} e^{-L[a]/2}.

    Exponents are capped so a single wildly wrong-leaning LLR cannot overflow
    the running mean; affected estimates are clipped to 1 downstream anyway.
    """
    d = leaf_llrs.shape[-1]
    ex = np.minimum(-leaf_llrs[..., 1:] / 2.0, _EXP_CAP)
    return np.exp(ex).sum(axis=-1) / (d - 1)


def genie_zero_leaf_likelihoods(lik, alpha: int) -> np.ndarray:
    """Likelihood-domain image of :func:`genie_zero_leaf_llrs`.

    Internal nodes stay in (max-normalised) likelihoods, so the all-zero
    genie pass runs without any transcendental calls: the check node is the
    cyclic correlation S[i] = sum_j E1[alpha*j + i] E2[j] and the variable
    node at u = 0 is the product G[i] = E2[i] E1[alpha*i].  Entries that
    underflow the normalised scale flush to zero (certainly impossible),
    which only discards LLR magnitudes beyond ~700.  Agrees with the
    log-domain pass within float rounding; used by Monte-Carlo construction.
    """
    E = np.array(lik, dtype=float)
    B, N, d = E.shape
    gidx = (alpha * np.arange(d)) % d
    idx = _f_index(d, alpha % d)
    E /= np.maximum(E.max(axis=-1, keepdims=True), 1e-300)
    # With all decisions pinned, the f/g halves of every block are independent,
    # so each tree level is two whole-array operations (breadth-first sweep).
    bs = N
    while bs > 1:
        h = bs // 2
        v = E.reshape(B, N // bs, bs, d)
        e1, e2 = v[:, :, :h], v[:, :, h:]
        s = np.empty_like(e1)
        for i in range(d):
            s[..., i] = np.einsum("...j,...j->...", e1[..., idx[i]], e2)
        g = e2 * e1[..., gidx]
        v[:, :, :h] = s / np.maximum(s.max(axis=-1, keepdims=True), 1e-300)
        v[:, :, h:] = g / np.maximum(g.max(axis=-1, keepdims=True), 1e-300)
        bs = h
    return E


def bhattacharyya_summand_lik(leaf_lik: np.ndarray) -> np.ndarray:
    """Bhattacharyya contribution from leaf likelihoods: mean of sqrt(E_a / E_0)."""
    d = leaf_lik.shape[-1]
    ratio = leaf_lik[..., 1:] / np.maximum(leaf_lik[..., :1], 1e-300)
    return np.sqrt(np.minimum(ratio, np.exp(2.0 * _EXP_CAP))).sum(axis=-1) / (d - 1)


# --- exact synthesised-channel oracle ------------------------------------------

def brute_force_wi(table, ys, i: int, prior, code: PolarCodeSpec) -> np.ndarray:
    """Exact likelihoods W^(i)((y, u_1^{i-1}) | a) for all a, by enumeration.

    ``table[x, y]`` is the single-use channel W(y | x) over a finite output
    alphabet, ``ys`` the received output indices, ``prior`` the i previously
    decided symbols (0-based: leaves 0..i-1).  Sums u_{i+1}^N uniformly:

        W^(i) = sum_{tail} d^{-(N-i-1)} prod_j table[(G_N u)_j, y_j].

    Test oracle only; refuses N > 8 or d > 3.
    """
    N, d = code.N, code.d
    if N > 8 or d > 3:
        raise ValueError(f"brute_force_wi is limited to N <= 8, d <= 3; got N={N}, d={d}")
    table = np.asarray(table, dtype=float)
    ys = np.asarray(ys, dtype=np.int64)
    prior = np.asarray(prior, dtype=np.int64)
    if ys.shape != (N,) or prior.shape != (i,):
        raise ValueError("output vector must have length N and prior length i")
    rest = N - i - 1
    u = np.zeros(N, dtype=np.int64)
    u[:i] = prior
    out = np.zeros(d)
    for a in range(d):
        u[i] = a
        tot = 0.0
        for tail in itertools.product(range(d), repeat=rest):
            u[i + 1:] = tail
            x = polar_encode(u, code)
            tot += float(np.prod(table[x, ys]))
        out[a] = tot / d ** rest
    return out
