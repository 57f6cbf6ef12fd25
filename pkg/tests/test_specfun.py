import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagasy import specfun as sf
from lagasy.errors import DomainError, OrderOutOfRange, RangeExceeded


def test_airy_at_zero():
    ai0 = 3 ** (-2 / 3) / math.exp(sf.log_gamma(2 / 3))
    aip0 = -(3 ** (-1 / 3)) / math.exp(sf.log_gamma(1 / 3))
    assert sf.airy_ai(0).real == pytest.approx(0.355028053887817, rel=1e-14)
    assert sf.airy_ai(0).real == pytest.approx(ai0, rel=1e-14)
    assert sf.airy_ai_prime(0).real == pytest.approx(-0.258819403792807, rel=1e-14)
    assert sf.airy_ai_prime(0).real == pytest.approx(aip0, rel=1e-14)


@pytest.mark.parametrize("z", [1.0, -5.0, 8.9, 9.1, 30.0, 3 + 4j, 6 * np.exp(2j * np.pi / 3 * 0.99)])
def test_airy_against_mpmath(z):
    ref = complex(mpmath.airyai(mpmath.mpc(z)))
    refp = complex(mpmath.airyai(mpmath.mpc(z), derivative=1))
    tol = 1e-13 if np.imag(z) == 0 else 1e-11
    assert abs(sf.airy_ai(z) - ref) <= tol * abs(ref)
    assert abs(sf.airy_ai_prime(z) - refp) <= tol * abs(refp)


def test_airy_range_and_realness():
    with pytest.raises(RangeExceeded):
        sf.airy_ai(2e4)
    x = np.linspace(-20, 20, 81)
    assert np.all(np.imag(sf.airy_ai(x)) == 0)


def test_airy_scaled_matches_unscaled():
    z = 2.5 + 1j
    ai, aip, zeta = sf.airy_scaled(z)
    assert abs(ai * np.exp(-zeta) - sf.airy_ai(z)) <= 1e-14 * abs(sf.airy_ai(z))


def test_airy_zeros():
    a = sf.airy_zeros(3)
    assert a[0] == pytest.approx(-2.338107410459767, rel=1e-14)
    assert np.all(np.abs(sf.airy_ai(a)) < 1e-13)


def test_bessel_examples():
    assert sf.bessel_j(0, 0) == 1
    x = 2.0
    assert sf.bessel_j(0.5, x).real == pytest.approx(math.sqrt(2 / (math.pi * x)) * math.sin(x), rel=1e-14)
    assert sf.bessel_j(0.5, x).real == pytest.approx(0.513016, rel=1e-6)


@pytest.mark.parametrize("nu", [0.0, 0.5, -0.5, 0.3, 2.8])
@pytest.mark.parametrize("z", [0.7, 11.9, 12.0, 12.1, 40.0, 12j, 5 + 7j])
def test_bessel_against_mpmath(nu, z):
    ref = complex(mpmath.besselj(nu, mpmath.mpc(z)))
    refp = complex(mpmath.besselj(nu, mpmath.mpc(z), derivative=1))
    assert abs(sf.bessel_j(nu, z) - ref) <= 1e-12 * abs(ref)
    assert abs(sf.bessel_j_prime(nu, z) - refp) <= 1e-11 * max(abs(refp), abs(ref))


def test_bessel_errors_and_realness():
    with pytest.raises(OrderOutOfRange):
        sf.bessel_j(-1.0, 1.0)
    with pytest.raises(RangeExceeded):
        sf.bessel_j(0.0, 1e5)
    x = np.linspace(0.1, 50, 40)
    assert np.all(np.imag(sf.bessel_j(0.3, x)) == 0)


def test_bessel_scaled():
    z = 3 + 4j
    j, jp = sf.bessel_j_scaled(0.3, z)
    assert abs(j * math.exp(4) - sf.bessel_j(0.3, z)) <= 1e-13 * abs(sf.bessel_j(0.3, z))


def test_mcmahon_close_to_zeros():
    k = np.arange(5, 10)
    zs = sf.bessel_zeros_mcmahon(0.3, k)
    assert np.all(np.abs(sf.bessel_j(0.3, zs)) < 1e-7)


def test_modified_bessel():
    assert sf.bessel_i01(0, 0.0) == 1.0
    assert sf.bessel_i01(1, 0.0) == 0.0
    assert sf.bessel_i01(0, 1.0) == pytest.approx(1.26606587775, rel=1e-11)
    for x in (0.5, 7.0, 60.0):
        assert sf.bessel_i01(1, x) == pytest.approx(float(mpmath.besseli(1, x)), rel=1e-12)
        assert sf.bessel_i01_scaled(0, x) == pytest.approx(float(mpmath.besseli(0, x) * mpmath.exp(-x)), rel=1e-12)
    with pytest.raises(DomainError):
        sf.bessel_i01(0, math.nan)


def test_lambert_examples():
    assert sf.lambert_w0(0) == 0
    assert sf.lambert_w0(math.e) == pytest.approx(1.0, rel=1e-15)
    # frozen from mpmath.lambertw at 30 digits
    assert sf.lambert_w0(8 * math.pi * 100) == pytest.approx(6.032225585400760, rel=1e-14)
    with pytest.raises(DomainError):
        sf.lambert_w0(-0.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-1 / math.e + 1e-12, max_value=1e12))
def test_lambert_residual(x):
    w = sf.lambert_w0(x)
    assert abs(w * math.exp(w) - x) <= 1e-14 * (1 + abs(x)) * max(1.0, abs(w))


def test_log_gamma_examples():
    assert sf.log_gamma(1.0) == 0.0
    assert sf.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
    assert math.exp(sf.log_gamma(6.5)) == pytest.approx(10395 * math.sqrt(math.pi) / 64, rel=1e-14)
    with pytest.raises(DomainError):
        sf.log_gamma(0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=1e6))
def test_log_gamma_recurrence(x):
    lhs = sf.log_gamma(x + 1)
    rhs = sf.log_gamma(x) + math.log(x)
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs))
