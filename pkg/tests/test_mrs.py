import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagasy import mrs
from lagasy.constants import a_k
from lagasy.errors import WrongKind
from lagasy.weight import classical, exp_weight, monomial, parse_weight, polynomial
from lagasy.specfun import bessel_i01


def test_monomial_closed_form():
    assert mrs.mrs_monomial(classical(0.0), 25) == pytest.approx(100.0, rel=1e-15)
    assert mrs.mrs_monomial(monomial(0.0, 2, 1.0), 6) == pytest.approx(4.0, rel=1e-15)
    assert mrs.mrs_monomial(monomial(0.0, 1, 2.0), 10) == pytest.approx(20.0, rel=1e-15)
    with pytest.raises(WrongKind):
        mrs.mrs_monomial(exp_weight(0.0), 10)


def test_poly_expansion_examples():
    e = mrs.mrs_poly_expansion(classical(0.0), K=3)
    assert np.allclose(e.coeffs, [4, 0, 0, 0], atol=1e-15)
    e = mrs.mrs_poly_expansion(polynomial(0.0, [0, 1, 1]), K=4)
    assert e.coeffs[0] == pytest.approx(math.sqrt(8 / 3), rel=1e-14)
    assert e.coeffs[1] == pytest.approx(-1 / 3, rel=1e-14)
    with pytest.raises(WrongKind):
        mrs.mrs_poly_expansion(exp_weight(0.0), K=2)


@pytest.mark.parametrize("coeffs", [[0, 1, 1], [0, 2, -1, 0.7], [1, 0, 3, 0.5, 2]])
def test_first_correction_closed_form(coeffs):
    m, q = len(coeffs) - 1, coeffs
    e = mrs.mrs_poly_expansion(polynomial(0.0, coeffs), K=2 * m)
    assert e.coeffs[1] == pytest.approx(-2 * (m - 1) * q[m - 1] / (m * (2 * m - 1) * q[m]), abs=1e-14)


@pytest.mark.parametrize("coeffs", [[0, 1, 1], [0, 2, -1, 0.7]])
def test_expansion_residual_decays(coeffs):
    w = polynomial(0.0, coeffs)
    m = w.m
    K = 2 * m
    e = mrs.mrs_poly_expansion(w, K=K)
    errs = [abs(e.evaluate(n) - mrs.mrs_poly_root(w, n)) / mrs.mrs_poly_root(w, n) for n in (1e3, 1e5)]
    # relative error of the truncated series is O(n^{-(K+1)/m})
    assert errs[1] < errs[0] * 100 ** (-(K + 1) / m) * 10 + 1e-15


def test_power_table_cauchy_product():
    e = mrs.mrs_poly_expansion(polynomial(0.0, [0, 2, -1, 0.7]), K=6)
    P = e.power_table()
    b = np.asarray(e.coeffs)
    for k in range(1, e.m + 1):
        for l in range(e.K + 1):
            assert P[k, l] == pytest.approx(sum(P[k - 1, i] * b[l - i] for i in range(l + 1)), abs=1e-14)


def test_q0_does_not_change_expansion():
    a = mrs.mrs_poly_expansion(polynomial(0.0, [0, 2, -1, 0.7]), K=6)
    b = mrs.mrs_poly_expansion(polynomial(0.0, [5.5, 2, -1, 0.7]), K=6)
    assert a.coeffs == b.coeffs


def test_quadratic_exact():
    assert mrs.mrs_quadratic_exact(monomial(0.0, 2, 1.0), 6) == pytest.approx(4.0, rel=1e-15)
    w = polynomial(0.0, [0, 1, 1])
    assert mrs.mrs_quadratic_exact(w, 1) == pytest.approx(4 / 3, rel=1e-15)
    assert mrs.mrs_numeric(w, 50, tol=1e-13) == pytest.approx(mrs.mrs_quadratic_exact(w, 50), rel=1e-12)
    with pytest.raises(WrongKind):
        mrs.mrs_quadratic_exact(classical(0.0), 5)


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_numeric_matches_closed_form_classical(n):
    assert mrs.mrs_numeric(classical(0.0), n, tol=1e-13) == pytest.approx(4 * n, rel=1e-11)


def test_numeric_integral_residual():
    w = polynomial(0.3, [1, 0.5, 0, 2])
    for n in (7, 70, 700):
        b = mrs.mrs_numeric(w, n, tol=1e-13)
        assert abs(mrs.mrs_integral(w, b) - 2 * math.pi * n) <= 1e-12 * 2 * math.pi * n


def test_exp_field():
    n = 10
    b = mrs.mrs_numeric(exp_weight(0.0), n)
    lhs = 2 * b * math.exp(b / 2) * (bessel_i01(0, b / 2) + bessel_i01(1, b / 2))
    assert abs(lhs - 8 * n) <= 1e-10 * n
    assert mrs.exp_beta_residual(n, b) <= 1e-10 * n
    # frozen from mpmath.lambertw(8 pi n^2) / 2
    assert mrs.mrs_exp_asymptotic(n) == pytest.approx(3.016112792700380, rel=1e-14)


def test_exp_asymptotic_leading_terms():
    n = 1e8
    approx = math.log(n) - math.log(math.log(8 * math.pi * n * n)) / 2 + math.log(8 * math.pi) / 2
    L = math.log(n)
    assert abs(mrs.mrs_exp_asymptotic(n) - approx) <= 2 * math.log(L) / L


def test_hn_poly_examples():
    assert np.allclose(mrs.hn_poly(classical(0.0)), [4.0], rtol=1e-15)
    assert np.allclose(mrs.hn_poly(monomial(0.0, 2, 1.0)), [4 / 3, 8 / 3], rtol=1e-15)
    h3 = mrs.hn_poly(monomial(0.0, 3, 0.7))
    ref = [2 / (3 * a_k(3)) * a_k(2 - k) for k in range(3)]
    assert np.allclose(h3, ref, rtol=1e-15)


def test_hn_poly_independent_of_n_for_monomials():
    w = monomial(0.0, 3, 0.7)
    for n in (5, 40, 400):
        b = mrs.mrs_monomial(w, n)
        assert np.allclose(mrs.hn_poly(w, n, b), mrs.hn_poly(w), rtol=1e-13)


@pytest.mark.parametrize("coeffs", [[0, 1], [0, 0, 1], [0, 0, 0, 0.7], [0, 1, 1], [1, 2, -1, 0.7]])
def test_h_and_H_relation(coeffs):
    # (1-z) h(z)/2 = H'(z) z (1-z)/2 + H(z)(1-2z)/4 + 1 for every polynomial field
    w = polynomial(0.0, coeffs)
    n = 40
    b = mrs.mrs_beta(w, n)
    H = np.polynomial.Polynomial(mrs.hn_poly(w, n, b))
    h = np.polynomial.Polynomial(mrs.h_poly(w, n, b))
    z = np.linspace(-1, 2, 13)
    lhs = (1 - z) * h(z) / 2
    rhs = H.deriv()(z) * z * (1 - z) / 2 + H(z) * (1 - 2 * z) / 4 + 1
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_ln_examples():
    w = classical(0.0)
    assert mrs.ln_coeff(w, 10, 40.0) == pytest.approx(-2 - 4 * math.log(2), rel=1e-15)
    w3 = classical(0.0, q0=3.0)
    assert mrs.ln_coeff(w3, 10, 40.0) == pytest.approx(-2 - 4 * math.log(2) - 0.3, rel=1e-15)


@pytest.mark.parametrize("w", [monomial(0.0, 2, 1.0), polynomial(0.0, [1, 2, -1, 0.7])])
def test_ln_matches_integral(w):
    n = 30
    b = mrs.mrs_beta(w, n)
    assert mrs.ln_coeff(w, n, b) == pytest.approx(mrs.ln_integral(w, n, b), abs=1e-9)


def test_h_taylor_classical():
    d = mrs.h_taylor(classical(0.0), 20, 80.0, "left", 6)
    c = mrs.h_taylor(classical(0.0), 20, 80.0, "right", 6)
    assert d[0] == pytest.approx(4.0, abs=1e-12) and c[0] == pytest.approx(4.0, abs=1e-12)
    assert np.all(np.abs(d[1:]) < 1e-12) and np.all(np.abs(c[1:]) < 1e-12)


@pytest.mark.parametrize("w", [monomial(0.0, 2, 1.0), monomial(0.0, 3, 0.7), polynomial(0.0, [0, 1, 1])])
def test_h_taylor_matches_polynomial(w):
    n = 40
    b = mrs.mrs_beta(w, n)
    h = mrs.h_poly(w, n, b)
    d = mrs.h_taylor(w, n, b, "left", w.m + 2)
    c = mrs.h_taylor(w, n, b, "right", w.m + 2)
    hd = np.concatenate([h, [0, 0]])
    hc = np.concatenate([mrs.taylor_shift(h, 1.0), [0, 0]])
    assert np.allclose(d, hd, rtol=1e-10, atol=1e-10)
    assert np.allclose(c, hc, rtol=1e-10, atol=1e-10)


def test_h_taylor_exp_field_is_consistent():
    w = exp_weight(0.0)
    n = 10
    b = mrs.mrs_beta(w, n)
    c = mrs.h_taylor(w, n, b, "right", 12)
    assert c[0] > 0
    z = 1.05
    series = np.polynomial.polynomial.polyval(z - 1, c)
    direct = np.real(mrs.h_eval(w, n, b, z)[0])
    assert series == pytest.approx(direct, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.floats(0.2, 3.0), st.integers(1, 2000))
def test_mrs_paths_agree(m, qm, n):
    w = monomial(0.0, m, qm)
    b = mrs.mrs_monomial(w, n)
    assert mrs.mrs_poly_root(w, n) == pytest.approx(b, rel=1e-12)
    assert abs(mrs.mrs_integral(w, b) - 2 * math.pi * n) <= 1e-11 * 2 * math.pi * n
