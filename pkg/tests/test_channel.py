import math

import numpy as np
import pytest

from gkp_polar.channel import (ChannelSpec, FiniteEnergyParams, SyndromeSample,
                               centered_residues, channel_llr_table,
                               channel_llr_table_phase, effective_sigma,
                               is_prime, likelihood_table, lim_gap_bound,
                               log_p_joint_table, p_cond, p_joint,
                               p_joint_finite, p_joint_gauss_sum,
                               p_joint_phase, p_joint_theta_series, p_lim,
                               p_syndrome, sample, sample_batch, wrap_syndrome)
from gkp_polar.quadrature import composite_gl


def gauss_sum_oracle(d, sigma, u, s1, lmax=20):
    """Independent brute-force sum of the defining Gaussian series."""
    cent = u % d if (d == 2 or u % d <= (d - 1) // 2) else u % d - d
    w = (cent + s1) / d
    tot = sum(math.exp(-(math.pi * d / sigma ** 2) * (l + w) ** 2)
              for l in range(-lmax, lmax + 1))
    return tot / (sigma * math.sqrt(d))


def test_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec(4, 0.5)
    with pytest.raises(ValueError):
        ChannelSpec(3, 0.0)
    with pytest.raises(ValueError):
        SyndromeSample(0, 0.5)
    assert is_prime(2) and is_prime(17) and not is_prime(1) and not is_prime(9)


def test_centered_residues():
    assert centered_residues(2).tolist() == [0, 1]
    assert centered_residues(5).tolist() == [0, 1, 2, -2, -1]


def test_p_joint_matches_bruteforce_sum():
    spec = ChannelSpec(3, 0.5)
    got = p_joint(spec, 0, 0.0)
    assert got == pytest.approx(gauss_sum_oracle(3, 0.5, 0, 0.0), rel=1e-12)


def test_p_joint_bruteforce_grid():
    rng = np.random.default_rng(7)
    for _ in range(30):
        d = int(rng.choice([2, 3, 5, 7]))
        sigma = float(rng.uniform(0.25, 1.8))
        u = int(rng.integers(0, d))
        s1 = float(rng.uniform(-0.5, 0.4999))
        spec = ChannelSpec(d, sigma)
        assert p_joint(spec, u, s1) == pytest.approx(
            gauss_sum_oracle(d, sigma, u, s1), rel=1e-11)


def test_p_joint_poisson_pair():
    # theta-series route and Gaussian-sum route agree where both are stable
    rng = np.random.default_rng(11)
    for _ in range(30):
        d = int(rng.choice([2, 3, 5, 7]))
        sigma = float(math.sqrt(rng.uniform(0.15, 0.5) * d))
        u = int(rng.integers(0, d))
        s1 = float(rng.uniform(-0.5, 0.4999))
        spec = ChannelSpec(d, sigma)
        a = p_joint_theta_series(spec, u, s1)
        b = p_joint_gauss_sum(spec, u, s1)
        assert a == pytest.approx(b, rel=1e-11)


def test_p_joint_uniform_limit_large_sigma():
    spec = ChannelSpec(3, 40.0)
    for u in range(3):
        assert p_joint(spec, u, 0.23) == pytest.approx(1.0 / 3.0, rel=1e-10)


def test_p_joint_normalisation():
    spec = ChannelSpec(3, 0.5)
    total = sum(composite_gl(lambda s, u=u: p_joint(spec, u, s), -0.5, 0.5)[0]
                for u in range(3))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_p_joint_rejects_out_of_range_syndrome():
    spec = ChannelSpec(3, 0.5)
    with pytest.raises(ValueError):
        p_joint(spec, 0, 0.5)
    with pytest.raises(ValueError):
        p_joint(spec, 0, -0.51)


def test_p_joint_phase_relations():
    spec = ChannelSpec(5, 0.6)
    assert p_joint_phase(spec, 2, 0.0) == p_joint(spec, 2, 0.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = int(rng.integers(0, 5))
        s = float(rng.uniform(-0.4999, 0.4999))
        assert p_joint_phase(spec, v, s) == pytest.approx(p_joint(spec, v, -s), rel=1e-14)


def test_p_joint_phase_normalisation():
    spec = ChannelSpec(3, 0.7)
    total = sum(composite_gl(lambda s, v=v: p_joint_phase(spec, v, s), -0.5, 0.5)[0]
                for v in range(3))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_p_syndrome_marginalisation_and_normalisation():
    spec = ChannelSpec(5, 0.45)
    for s1 in np.linspace(-0.5, 0.49, 21):
        bysum = sum(p_joint(spec, u, float(s1)) for u in range(5))
        assert abs(p_syndrome(spec, float(s1)) - bysum) < 1e-12
    total, _ = composite_gl(lambda s: p_syndrome(spec, s), -0.5, 0.5)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_p_syndrome_flattens_for_large_d_sigma2():
    spec = ChannelSpec(17, 1.0)
    for s1 in np.linspace(-0.5, 0.49, 11):
        assert abs(p_syndrome(spec, float(s1)) - 1.0) < 1e-12


def test_p_cond_sums_to_one_and_noise_free_limit():
    spec = ChannelSpec(3, 0.5)
    assert sum(p_cond(spec, u, 0.3) for u in range(3)) == pytest.approx(1.0, abs=1e-12)
    quiet = ChannelSpec(3, 0.05)
    assert p_cond(quiet, 0, 0.3) == pytest.approx(1.0, abs=1e-12)
    spec3 = ChannelSpec(3, 0.5)
    for u in range(3):
        num = gauss_sum_oracle(3, 0.5, u, 0.21)
        den = sum(gauss_sum_oracle(3, 0.5, uu, 0.21) for uu in range(3))
        assert p_cond(spec3, u, 0.21) == pytest.approx(num / den, rel=1e-11)


def test_p_lim_and_gap_bound():
    spec = ChannelSpec(5, 0.5)
    assert p_lim(spec, 0, 0.0) == pytest.approx(1.0 / (0.5 * math.sqrt(5)))
    bound = lim_gap_bound(spec)
    worst = 0.0
    for u in range(5):
        for s1 in np.linspace(-0.5, 0.49, 41):
            worst = max(worst, abs(p_joint(spec, u, float(s1)) - p_lim(spec, u, float(s1))))
    assert worst <= bound
    # exponent -d pi/(4 sigma^2) = -17 pi at d=17, sigma=0.5: bound ~ 6.4e-24
    tiny = lim_gap_bound(ChannelSpec(17, 0.5))
    assert tiny < 1e-22
    assert tiny == pytest.approx(2 * math.exp(-17 * math.pi) / (0.5 * math.sqrt(17)), rel=1e-3)


def test_reflection_symmetry():
    rng = np.random.default_rng(5)
    for d in (2, 3, 7):
        spec = ChannelSpec(d, 0.62)
        for _ in range(20):
            u = int(rng.integers(0, d))
            s1 = float(rng.uniform(-0.4999, 0.4999))
            assert p_joint(spec, u, s1) == pytest.approx(
                p_joint(spec, (d - u) % d, -s1), rel=1e-12)


def test_canonicalisation_mod_d():
    spec = ChannelSpec(5, 0.7)
    assert p_joint(spec, 7, 0.1) == p_joint(spec, 2, 0.1)
    assert p_joint(spec, -3, 0.1) == p_joint(spec, 2, 0.1)


def test_sample_quiet_limit_and_types():
    spec = ChannelSpec(5, 0.01)
    rng = np.random.default_rng(1)
    for _ in range(50):
        smp = sample(spec, rng)
        assert smp.u == 0
        assert abs(smp.s1) < 0.1


def test_sample_symmetry_mean():
    spec = ChannelSpec(3, 0.6)
    rng = np.random.default_rng(2)
    _, s = sample_batch(spec, rng, 200_000)
    assert abs(s.mean()) < 4.0 * s.std() / math.sqrt(s.size)


def test_sample_binned_vs_quadrature():
    # chi^2-style check: empirical bin masses within 4 standard errors
    d, sigma, n = 5, 0.4, 1_000_000
    spec = ChannelSpec(d, sigma)
    rng = np.random.default_rng(20260811)
    u, s = sample_batch(spec, rng, n)
    edges = np.linspace(-0.5, 0.5, 21)
    for uu in range(d):
        hist, _ = np.histogram(s[u == uu], bins=edges)
        for b in range(20):
            prob, _ = composite_gl(lambda x, uu=uu: p_joint(spec, uu, x),
                                   float(edges[b]), float(edges[b + 1]), panels=4)
            se = math.sqrt(prob * (1 - prob) * n)
            assert abs(hist[b] - prob * n) < 4.0 * se + 1e-9


def test_wrap_syndrome():
    assert wrap_syndrome(0.5) == -0.5
    assert wrap_syndrome(-0.5) == -0.5
    assert wrap_syndrome(1.3) == pytest.approx(0.3)
    assert wrap_syndrome(0.2) == 0.2


def test_effective_sigma():
    assert effective_sigma(FiniteEnergyParams(0.3, 0.0, 0.0)) == 0.3
    fe = FiniteEnergyParams(0.2, 0.4, 0.3)
    sd = math.tanh(0.4 ** 2 / 2)
    sa = math.tanh(0.3 ** 2 / 2)
    assert effective_sigma(fe) == pytest.approx(math.sqrt(0.2 ** 2 + sd ** 2 + 2 * sa ** 2))


def test_p_joint_finite_degenerate_and_widening():
    spec = ChannelSpec(3, 0.5)
    fe0 = FiniteEnergyParams(0.5, 0.3, 0.0)
    for s1 in (-0.3, 0.0, 0.2):
        assert p_joint_finite(spec, fe0, 1, s1) == pytest.approx(p_joint(spec, 1, s1), rel=1e-13)
    fe = FiniteEnergyParams(0.5, 0.0, 0.6)
    grid = np.linspace(-0.5, 0.49, 101)
    sharp = sum(max(p_joint(spec, u, float(s)) for s in grid) for u in range(3))
    smeared = sum(max(p_joint_finite(spec, fe, u, float(s)) for s in grid) for u in range(3))
    assert smeared <= sharp
    total = sum(composite_gl(lambda s, u=u: p_joint_finite(spec, fe, u, s), -0.5, 0.5)[0]
                for u in range(3))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_llr_table_consistency():
    spec = ChannelSpec(5, 0.5)
    rng = np.random.default_rng(9)
    y, s = sample_batch(spec, rng, (4, 6))
    L = channel_llr_table(spec, y, s)
    assert L.shape == (4, 6, 5)
    assert np.all(L[..., 0] == 0.0)
    for b in range(4):
        for j in range(6):
            for a in range(5):
                expect = (math.log(p_joint(spec, int(y[b, j]), float(s[b, j])))
                          - math.log(p_joint(spec, int(y[b, j]) - a, float(s[b, j]))))
                assert L[b, j, a] == pytest.approx(expect, rel=1e-10, abs=1e-10)


def test_llr_table_phase_consistency():
    spec = ChannelSpec(3, 0.45)
    rng = np.random.default_rng(10)
    v, sraw = sample_batch(spec, rng, (2, 5))
    s2 = wrap_syndrome(-sraw)
    L = channel_llr_table_phase(spec, v, s2)
    for b in range(2):
        for j in range(5):
            for a in range(3):
                expect = (math.log(p_joint_phase(spec, int(v[b, j]), float(s2[b, j])))
                          - math.log(p_joint_phase(spec, int(v[b, j]) - a, float(s2[b, j]))))
                assert L[b, j, a] == pytest.approx(expect, rel=1e-10, abs=1e-10)


def test_likelihood_table_matches_log_table():
    spec = ChannelSpec(5, 0.4)
    rng = np.random.default_rng(12)
    y, s = sample_batch(spec, rng, (8, 16))
    L = channel_llr_table(spec, y, s)
    E = likelihood_table(spec, y, s)
    ref = np.exp(L.min(axis=-1, keepdims=True) - L)
    got = E / E.max(axis=-1, keepdims=True)
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-300)


def test_log_p_joint_table_matches_scalar():
    spec = ChannelSpec(3, 0.8)
    s = np.array([-0.41, 0.0, 0.33])
    tab = log_p_joint_table(spec, s)
    for i, s1 in enumerate(s):
        for r in range(3):
            assert tab[i, r] == pytest.approx(math.log(p_joint(spec, r, float(s1))), rel=1e-12)
