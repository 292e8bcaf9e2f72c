import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkp_polar.theta import (duality_residual, lattice_theta,
                             log_lattice_theta, theta2, theta3)


def test_theta3_zero_nome_is_one():
    assert theta3(0.7, 0.0) == 1.0


def test_theta3_partial_series_by_hand():
    # 1 + 2(0.1 + 0.1^4 + 0.1^9 + 0.1^16), higher terms below 1e-15 relative
    expected = 1.0 + 2.0 * (0.1 + 0.1 ** 4 + 0.1 ** 9 + 0.1 ** 16)
    assert theta3(0.0, 0.1) == pytest.approx(expected, rel=1e-15, abs=0)


def test_theta3_half_period_alternates():
    # cos(n pi) = (-1)^n turns the series into 1 - 2q + 2q^4 - 2q^9 + ...
    q = 0.3
    expected = 1.0 + 2.0 * sum((-1) ** n * q ** (n * n) for n in range(1, 12))
    assert theta3(math.pi / 2, q) == pytest.approx(expected, rel=1e-14)


def test_theta3_rejects_bad_nome():
    with pytest.raises(ValueError):
        theta3(0.0, 1.0)
    with pytest.raises(ValueError):
        theta3(0.0, 1.2 + 0.1j)


@pytest.mark.parametrize("u,q", [(0.0, 0.3), (1.1, 0.65), (0.4, 0.2 + 0.4j),
                                 (2.2, -0.5), (0.9, 0.95), (0.0, 0.999)])
def test_theta3_against_mpmath(u, q):
    ref = complex(mpmath.jtheta(3, u, q))
    got = complex(theta3(u, q))
    assert got == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("u,q", [(0.0, 0.01), (0.0, 0.4), (0.7, 0.3), (math.pi / 3, 0.8)])
def test_theta2_against_highprec_series(u, q):
    # independent high-precision sum of the same alternating series
    with mpmath.workdps(40):
        ref = 2 * mpmath.mpf(q) ** mpmath.mpf("0.25") * mpmath.nsum(
            lambda n: (-1) ** int(n) * mpmath.mpf(q) ** (n * (n + 1))
            * mpmath.cos((2 * n + 1) * u), [0, mpmath.inf])
    assert theta2(u, q) == pytest.approx(float(ref), rel=1e-12)


def test_theta2_zero_nome():
    assert theta2(0.0, 0.0) == 0.0


def test_theta2_two_term_series_by_hand():
    # 2 * 0.01^(1/4) * (1 - 0.01^2 + 0.01^6 - ...)
    expected = 2.0 * 0.01 ** 0.25 * (1.0 - 0.01 ** 2 + 0.01 ** 6)
    assert theta2(0.0, 0.01) == pytest.approx(expected, rel=1e-14)


def test_theta2_vanishes_at_half_period():
    # cos((2n+1) pi/2) = 0 for every term
    assert abs(theta2(math.pi / 2, 0.4)) < 1e-14


def test_theta2_rejects_bad_nome():
    with pytest.raises(ValueError):
        theta2(0.0, 1.0)
    with pytest.raises(ValueError):
        theta2(0.0, -0.1)


def test_duality_fixed_point_and_symmetry():
    assert duality_residual(1.0) < 1e-14
    assert duality_residual(0.5) == duality_residual(2.0)


@pytest.mark.parametrize("t", [0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 10.0])
def test_duality_residual_small(t):
    assert duality_residual(t) < 1e-10


def test_duality_rejects_nonpositive():
    with pytest.raises(ValueError):
        duality_residual(0.0)


@settings(max_examples=60, deadline=None)
@given(u=st.floats(-10, 10), q=st.floats(0.0, 0.9))
def test_theta3_periodic_in_2pi(u, q):
    assert theta3(u, q) == pytest.approx(theta3(u + 2 * math.pi, q), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(q=st.floats(0.01, 0.9), dq=st.floats(0.005, 0.09))
def test_theta3_monotone_in_nome_at_zero(q, dq):
    hi = min(q + dq, 0.95)
    assert theta3(0.0, q) < theta3(0.0, hi)


@settings(max_examples=40, deadline=None)
@given(u=st.floats(-3, 3), re=st.floats(-0.5, 0.5), im=st.floats(0.01, 0.5))
def test_theta3_conjugate_symmetry(u, re, im):
    q = complex(re, im)
    if abs(q) >= 0.95:
        return
    assert theta3(u, q.conjugate()) == pytest.approx(complex(theta3(u, q)).conjugate(),
                                                     rel=1e-12, abs=1e-12)


def test_lattice_theta_routes_agree():
    # both sides of the modular switch must represent the same function
    for a in (0.5, 0.9, 0.999, 1.0, 1.001, 2.0):
        for w in (-0.5, -0.2, 0.0, 0.3, 0.49):
            ref = float(mpmath.jtheta(3, math.pi * w, math.exp(-math.pi * a)))
            assert lattice_theta(w, a) == pytest.approx(ref, rel=1e-12)
            assert log_lattice_theta(w, a) == pytest.approx(math.log(ref), rel=1e-10, abs=1e-13)


def test_log_lattice_theta_deep_tail():
    # far in the tail the log form keeps full relative precision
    val = log_lattice_theta(0.5, 0.01)
    # theta3(pi/2, e^{-pi a}) = 2 a^{-1/2} e^{-pi/(4a)} (1 + e^{-2pi/a} + ...)
    expected = math.log(2.0) - 0.5 * math.log(0.01) - math.pi / 0.04
    assert val == pytest.approx(expected, rel=1e-12)


def test_theta3_extreme_nome_uses_modular_route():
    q = math.exp(-math.pi / 500)
    ref = float(mpmath.jtheta(3, 0.0, mpmath.mpf(q)))
    assert theta3(0.0, q) == pytest.approx(ref, rel=1e-12)
