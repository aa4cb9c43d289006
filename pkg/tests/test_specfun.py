import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracspec import specfun
from fracspec._validation import ConvergenceError

ALPHAS = [0.2, 0.5, 0.8, 1.2, 1.5, 1.8]
mp.mp.dps = 40


def test_c_alpha_vanishes_at_one():
    assert specfun.c_alpha(1.0) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_c_alpha_against_mpmath(alpha):
    a = mp.mpf(alpha)
    ref = (1 - a / 2) * (1 - a) / mp.gamma(a)
    assert specfun.c_alpha(alpha) == pytest.approx(float(ref), rel=1e-14)


def test_c_alpha_sign():
    assert specfun.c_alpha(0.5) > 0 > specfun.c_alpha(1.5)
    assert specfun.c_alpha(0.5) == pytest.approx(3 / (8 * math.sqrt(math.pi)), rel=1e-14)


def test_b_alpha_values():
    assert specfun.b_alpha(1.0) == pytest.approx(0.0, abs=1e-16)
    assert specfun.b_alpha(0.5) == pytest.approx(float(mp.cot(2 * mp.pi / 5)), rel=1e-14)
    assert specfun.b_alpha(1.5) == pytest.approx(-1 / math.sqrt(3), rel=1e-14)


@given(st.floats(0.01, 1.98), st.floats(0.001, 0.01))
def test_b_alpha_decreasing(alpha, step):
    assert specfun.b_alpha(alpha + step) < specfun.b_alpha(alpha)


def test_theta0_limits():
    assert specfun.theta0(3.0, 1.0) == 0.0
    for alpha in (0.3, 0.8, 1.4):
        assert specfun.theta0(1e-9, alpha) == pytest.approx(math.pi * (1 - alpha) / 2, rel=1e-12)
        assert abs(specfun.theta0(1e9, alpha)) < 1e-12


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_theta0_decreasing_and_bounded(alpha):
    t = np.logspace(-4, 4, 100)
    th = specfun.theta0(t, alpha)
    assert np.all(np.diff(th) < 0)
    assert np.all((th > 0) & (th < math.pi * (1 - alpha) / 2))


@pytest.mark.parametrize("alpha", [0.3, 0.9, 1.6])
def test_theta0_prime_matches_finite_difference(alpha):
    t = np.array([0.05, 0.7, 1.0, 3.0])
    h = 1e-6
    fd = (specfun.theta0(t + h, alpha) - specfun.theta0(t - h, alpha)) / (2 * h)
    assert np.allclose(specfun.theta0_prime(t, alpha), fd, rtol=1e-7, atol=1e-10)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_theta0_integral_matches_cotangent(alpha):
    value, err = specfun.theta0_integral(alpha)
    assert err <= 1e-9
    assert abs(value - math.pi * specfun.b_alpha(alpha)) <= 1e-8


def test_theta0_integral_at_one_and_budget():
    assert specfun.theta0_integral(1.0) == (0.0, 0.0)
    with pytest.raises(ConvergenceError):
        specfun.theta0_integral(0.5, tol=1e-30)


def _x0_closed(alpha, sign):
    return math.sqrt((3 - alpha) / 2) * np.exp(sign * 1j * math.pi * (1 - alpha) / 8)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_x0_at_plus_minus_i(alpha):
    for sign in (1, -1):
        assert abs(specfun.x0(sign * 1j, alpha) - _x0_closed(alpha, sign)) <= 1e-6


def test_x0_trivial_and_cut():
    assert specfun.x0(1j, 1.0) == 1
    with pytest.raises(ValueError):
        specfun.x0(2.0, 0.5)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_x0_far_field(alpha):
    z = -1e6
    assert abs(specfun.x0(z, alpha) - (1 + specfun.b_alpha(alpha) / 1e6)) <= 1e-12


@pytest.mark.parametrize("alpha", [1.2, 1.5])
def test_x0_far_field_above_one_decays(alpha):
    # the correction beyond b/z decays like |z|^(alpha-2) here
    d1 = abs(specfun.x0(-1e4, alpha) - (1 + specfun.b_alpha(alpha) / 1e4))
    d2 = abs(specfun.x0(-1e6, alpha) - (1 + specfun.b_alpha(alpha) / 1e6))
    assert d2 < d1 * 100.0 ** (alpha - 2) * 1.5


@pytest.mark.parametrize("alpha", [0.4, 1.6])
def test_x0_small_z_power(alpha):
    r = abs(specfun.x0(-1e-6, alpha)) / abs(specfun.x0(-1e-8, alpha))
    assert r == pytest.approx(100.0 ** ((alpha - 1) / 2), rel=1e-3)


@given(st.floats(-5, 5), st.floats(0.05, 5), st.sampled_from([0.3, 1.4]))
def test_x0_conjugate_symmetry(re, im, alpha):
    z = complex(re, im)
    assert abs(specfun.x0(z.conjugate(), alpha) - specfun.x0(z, alpha).conjugate()) < 1e-13


def test_h0_limits():
    assert specfun.h0(0.7, 1.0) == 0.0
    for alpha in (0.5, 1.5):
        assert specfun.h0(1e-10, alpha) == pytest.approx(math.sin(math.pi * (1 - alpha) / 2),
                                                         abs=1e-3)


@pytest.mark.parametrize("t", [1.0, 0.3, 2.5])
def test_h0_agrees_with_boundary_value_route(t):
    alpha = 0.5
    other = math.sin(specfun.theta0(t, alpha)) * abs(
        specfun.x0(-t, alpha) / specfun.x0_boundary(t, alpha))
    assert specfun.h0(t, alpha) == pytest.approx(other, abs=1e-6)


def test_h0_rejects_nonpositive():
    with pytest.raises(ValueError):
        specfun.h0([0.0, 1.0], 0.5)


def test_lambda_of_nu_classical():
    assert specfun.lambda_of_nu(math.pi / 2, 1.0) == pytest.approx(4 / math.pi ** 2, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("nu", [1.0, 10.0, 1e3])
def test_nu_lambda_round_trip(alpha, nu):
    assert specfun.nu_of_lambda(specfun.lambda_of_nu(nu, alpha), alpha) == pytest.approx(nu, rel=1e-12)


def test_scale_identity_against_mpmath():
    a = mp.mpf("0.5")
    lhs = mp.sin(mp.pi * a / 2) * mp.gamma(3 - a)
    rhs = (1 - a / 2) * (1 - a) / mp.gamma(a) * mp.pi / mp.cos(mp.pi * a / 2)
    assert abs(lhs - rhs) < mp.mpf(10) ** -30
    assert specfun.spectral_scale(0.5) == pytest.approx(float(lhs), rel=1e-12)


@given(st.floats(0.05, 1.95))
def test_lambda_decreasing(alpha):
    lam = specfun.lambda_of_nu(np.array([1.0, 2.0, 5.0, 50.0]), alpha)
    assert np.all(np.diff(lam) < 0)


def test_domain_errors():
    with pytest.raises(ValueError):
        specfun.lambda_of_nu(0.0, 0.5)
    with pytest.raises(ValueError):
        specfun.nu_of_lambda(-1.0, 0.5)
    with pytest.raises(ValueError):
        specfun.c_alpha(2.0)
