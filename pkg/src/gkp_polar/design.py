"""Monte-Carlo polar-code construction for the analog-syndrome GKP channel.

Per-index Bhattacharyya parameters of the synthesised channels are estimated
by genie-aided successive cancellation on the all-zero input: for each trial,
sample i.i.d. (error, syndrome) pairs, form channel LLR vectors

    L_j[a] = log(p1(u_j, s_j) / p1(u_j - a, s_j)),

run the decoder with every decision pinned to the true value 0, and average
exp(-L^(i)[a] / 2) over trials and a != 0.  The amplitude side uses the
plain kernel; the phase side uses the reversed/negated kernel and its leaf
estimates are re-indexed back to amplitude positions, so z1[i] and z2[i]
always refer to the same logical position i.

Classification freezes, independently per side, the smallest set of
largest-z indices whose complement keeps the union error bound
(d-1) * sum z under the budget c_e * N^{-beta}.  Minimising each frozen set
separately maximises the net rate because

    |I| - |E| = N - |A u E| - |P u E|

decomposes over the two sides.  Estimates are clipped to [0, 1]: raw means
can exceed 1 for useless indices, and above 1 the bound is vacuous anyway.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channel import (ChannelSpec, likelihood_table, likelihood_table_phase,
                      sample_batch, wrap_syndrome)
from .polar import (PolarCodeSpec, bhattacharyya_summand_lik,
                    genie_zero_leaf_likelihoods)

_SIDE_ID = {"amplitude": 1, "phase": 2}


@dataclass
class ZEstimates:
    """Monte-Carlo Bhattacharyya estimates; either side may be unfilled (None)."""

    z1: np.ndarray | None
    z2: np.ndarray | None
    m_samples: int
    seed: int

    def __post_init__(self):
        for z in (self.z1, self.z2):
            if z is not None and (np.any(z < 0) or np.any(z > 1)):
                raise ValueError("Z estimates must be clipped to [0, 1]")

    def merged(self, other: "ZEstimates") -> "ZEstimates":
        if self.m_samples != other.m_samples or self.seed != other.seed:
            raise ValueError("can only merge estimates from the same run")
        return ZEstimates(self.z1 if self.z1 is not None else other.z1,
                          self.z2 if self.z2 is not None else other.z2,
                          self.m_samples, self.seed)


@dataclass
class IndexSets:
    """Disjoint partition of {0..N-1}: info, amplitude-frozen, phase-frozen, entangled."""

    info: np.ndarray
    amp_frozen: np.ndarray
    phase_frozen: np.ndarray
    entangled: np.ndarray

    def __post_init__(self):
        parts = [np.asarray(p, dtype=np.int64) for p in
                 (self.info, self.amp_frozen, self.phase_frozen, self.entangled)]
        self.info, self.amp_frozen, self.phase_frozen, self.entangled = parts
        allidx = np.concatenate(parts)
        n = len(allidx)
        if len(np.unique(allidx)) != n or (n and (allidx.min() < 0 or allidx.max() >= n)):
            raise ValueError("index sets must be disjoint and cover 0..N-1")

    @property
    def N(self) -> int:
        return (len(self.info) + len(self.amp_frozen)
                + len(self.phase_frozen) + len(self.entangled))

    def amp_frozen_mask(self) -> np.ndarray:
        """Mask of A u E, the amplitude-side frozen positions."""
        m = np.zeros(self.N, dtype=bool)
        m[self.amp_frozen] = True
        m[self.entangled] = True
        return m

    def phase_frozen_mask(self) -> np.ndarray:
        """Mask of P u E, the phase-side frozen positions."""
        m = np.zeros(self.N, dtype=bool)
        m[self.phase_frozen] = True
        m[self.entangled] = True
        return m


@dataclass
class DesignArtifact:
    """Persisted result of one construction run, with full provenance."""

    d: int
    sigma: float
    n: int
    alpha: int
    m_samples: int
    seed: int
    c_e: float
    beta: float
    z: ZEstimates
    sets: IndexSets
    rate_bits_per_mode: float
    pe1_bound: float
    pe2_bound: float
    tool_version: str = __version__

    def __post_init__(self):
        if self.pe1_bound < 0 or self.pe2_bound < 0:
            raise ValueError("error bounds must be non-negative")
        if self.rate_bits_per_mode > math.log2(self.d) + 1e-12:
            raise ValueError("net rate cannot exceed log2(d)")

    @property
    def N(self) -> int:
        return 1 << self.n

    def channel_spec(self) -> ChannelSpec:
        return ChannelSpec(self.d, self.sigma)

    def code_spec(self) -> PolarCodeSpec:
        return PolarCodeSpec(self.n, self.d, self.alpha)


def _batch_size(N: int, d: int) -> int:
    # ~2^21 table entries per batch, capped where cache thrashing sets in;
    # the policy is a pure function of (N, d) so runs stay reproducible
    return max(16, min(128, (1 << 21) // (N * d)))


def estimate_z(spec: ChannelSpec, code: PolarCodeSpec, side: str,
               m_samples: int, seed: int) -> ZEstimates:
    """Estimate Z(W^(i)) for one side ('amplitude' or 'phase') of the split.

    Trials are processed in fixed-size vectorised batches; each batch derives
    its own generator from (seed, side, n, batch index), so results are
    bit-reproducible for a given (seed, m_samples) and independent of how
    many runs are scheduled concurrently elsewhere.
    """
    if side not in _SIDE_ID:
        raise ValueError(f"side must be 'amplitude' or 'phase', got {side!r}")
    if m_samples < 1:
        raise ValueError("need at least one sample")
    N = code.N
    alpha = code.alpha if side == "amplitude" else (-code.alpha) % code.d
    acc = np.zeros(N)
    done = 0
    batch = _batch_size(N, code.d)
    b = 0
    while done < m_samples:
        B = min(batch, m_samples - done)
        rng = np.random.default_rng((seed, _SIDE_ID[side], code.n, b))
        u, s = sample_batch(spec, rng, (B, N))
        if side == "phase":
            s2 = wrap_syndrome(-s)  # (v, s2) ~ p2
            lik = likelihood_table_phase(spec, u, s2)
            leaf = genie_zero_leaf_likelihoods(lik[:, ::-1], alpha)[:, ::-1]
        else:
            lik = likelihood_table(spec, u, s)
            leaf = genie_zero_leaf_likelihoods(lik, alpha)
        acc += bhattacharyya_summand_lik(leaf).sum(axis=0)
        done += B
        b += 1
    z = np.clip(acc / m_samples, 0.0, 1.0)
    return ZEstimates(z1=z if side == "amplitude" else None,
                      z2=z if side == "phase" else None,
                      m_samples=m_samples, seed=seed)


def _frozen_set(z: np.ndarray, d: int, budget: float) -> np.ndarray:
    """Smallest set of largest-z indices whose complement meets the budget."""
    order = np.argsort(-z, kind="stable")
    cum = np.concatenate(([0.0], np.cumsum(z[order])))
    remaining = (d - 1) * (float(z.sum()) - cum)
    k = int(np.argmax(remaining <= budget))  # first k that fits; k = N always does
    return np.sort(order[:k])


def classify(z: ZEstimates, budget: tuple[float, float], d: int) -> IndexSets:
    """Partition indices into info / amp-frozen / phase-frozen / entangled sets.

    ``budget = (c_e, beta)`` bounds both sides by c_e * N^{-beta} through the
    union bound (d-1) * sum of unfrozen Z estimates.
    """
    if z.z1 is None or z.z2 is None:
        raise ValueError("classification needs both sides of the Z estimates")
    c_e, beta = budget
    N = len(z.z1)
    thr = c_e * N ** (-beta)
    fa = _frozen_set(z.z1, d, thr)   # A u E
    fp = _frozen_set(z.z2, d, thr)   # P u E
    in_fa = np.zeros(N, dtype=bool)
    in_fa[fa] = True
    in_fp = np.zeros(N, dtype=bool)
    in_fp[fp] = True
    return IndexSets(info=np.flatnonzero(~in_fa & ~in_fp),
                     amp_frozen=np.flatnonzero(in_fa & ~in_fp),
                     phase_frozen=np.flatnonzero(~in_fa & in_fp),
                     entangled=np.flatnonzero(in_fa & in_fp))


def net_rate_and_bounds(sets: IndexSets, z: ZEstimates, d: int):
    """Net rate log2(d) (|I|-|E|)/N and the two union error bounds."""
    N = sets.N
    rate = math.log2(d) * (len(sets.info) - len(sets.entangled)) / N
    pe1 = (d - 1) * float(z.z1[~sets.amp_frozen_mask()].sum())
    pe2 = (d - 1) * float(z.z2[~sets.phase_frozen_mask()].sum())
    return rate, pe1, pe2


def design_code(spec: ChannelSpec, n: int, alpha: int, m_samples: int,
                budget: tuple[float, float], seed: int) -> DesignArtifact:
    """Run both estimation sides and classification for one block size."""
    code = PolarCodeSpec(n, spec.d, alpha)
    z = (estimate_z(spec, code, "amplitude", m_samples, seed)
         .merged(estimate_z(spec, code, "phase", m_samples, seed)))
    sets = classify(z, budget, spec.d)
    rate, pe1, pe2 = net_rate_and_bounds(sets, z, spec.d)
    return DesignArtifact(d=spec.d, sigma=spec.sigma, n=n, alpha=alpha,
                          m_samples=m_samples, seed=seed,
                          c_e=budget[0], beta=budget[1], z=z, sets=sets,
                          rate_bits_per_mode=rate, pe1_bound=pe1, pe2_bound=pe2)


def design_sequence(spec: ChannelSpec, alpha: int, n_list, m_samples: int,
                    budget: tuple[float, float], seed: int) -> list[DesignArtifact]:
    """Design one code per block-size exponent in ascending ``n_list``."""
    n_list = list(n_list)
    if n_list != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise ValueError("n_list must be strictly ascending")
    return [design_code(spec, n, alpha, m_samples, budget, seed) for n in n_list]


# --- artifact serialisation ---------------------------------------------------

def artifact_to_json(art: DesignArtifact) -> str:
    """Serialise to the stable single-document JSON schema (1-based set indices)."""
    doc = {
        "meta": {
            "d": art.d, "sigma": art.sigma, "n": art.n, "alpha": art.alpha,
            "m_samples": art.m_samples, "seed": art.seed,
            "c_e": art.c_e, "beta": art.beta, "tool_version": art.tool_version,
        },
        "z1": [float(v) for v in art.z.z1],
        "z2": [float(v) for v in art.z.z2],
        "sets": {
            "I": [int(i) + 1 for i in art.sets.info],
            "A": [int(i) + 1 for i in art.sets.amp_frozen],
            "P": [int(i) + 1 for i in art.sets.phase_frozen],
            "E": [int(i) + 1 for i in art.sets.entangled],
        },
        "rate_bits_per_mode": art.rate_bits_per_mode,
        "pe1_bound": art.pe1_bound,
        "pe2_bound": art.pe2_bound,
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def artifact_from_json(text: str) -> DesignArtifact:
    """Parse an artifact document, naming the offending key on failure."""
    doc = json.loads(text)
    try:
        meta = doc["meta"]
        z = ZEstimates(z1=np.asarray(doc["z1"], dtype=float),
                       z2=np.asarray(doc["z2"], dtype=float),
                       m_samples=int(meta["m_samples"]), seed=int(meta["seed"]))
        raw = doc["sets"]
        sets = IndexSets(info=np.asarray(raw["I"], dtype=np.int64) - 1,
                         amp_frozen=np.asarray(raw["A"], dtype=np.int64) - 1,
                         phase_frozen=np.asarray(raw["P"], dtype=np.int64) - 1,
                         entangled=np.asarray(raw["E"], dtype=np.int64) - 1)
        return DesignArtifact(
            d=int(meta["d"]), sigma=float(meta["sigma"]), n=int(meta["n"]),
            alpha=int(meta["alpha"]), m_samples=int(meta["m_samples"]),
            seed=int(meta["seed"]), c_e=float(meta["c_e"]), beta=float(meta["beta"]),
            z=z, sets=sets,
            rate_bits_per_mode=float(doc["rate_bits_per_mode"]),
            pe1_bound=float(doc["pe1_bound"]), pe2_bound=float(doc["pe2_bound"]),
            tool_version=str(meta["tool_version"]),
        )
    except KeyError as exc:
        raise ValueError(f"artifact document is missing key {exc.args[0]!r}") from exc
