import math

import numpy as np
import pytest

from lagasy.errors import AlphaOutOfRange, DegreeExceedsTable, PrecisionUnreachable
from lagasy.oracle import (RecurrenceTable, classical_coeffs, classical_eval, hermite_recurrence,
                           integrate_weight, oracle_eval, oracle_p, oracle_table, stieltjes_coeffs)
from lagasy.weight import QKind, WeightSpec, classical, exp_weight, formal_weight, monomial


def _dd(hi, lo):
    return np.asarray(hi, dtype=float) + np.asarray(lo, dtype=float)


def test_classical_eval_examples():
    assert classical_eval(0.0, 1, 3.0) == pytest.approx(2.0, rel=1e-15)
    assert classical_eval(0.0, 2, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert classical_eval(0.0, 0, np.array([0.5, 7.0])) == pytest.approx([1.0, 1.0])


def test_classical_eval_scaled_matches_plain():
    v = classical_eval(0.7, 40, 13.0)
    m, l = classical_eval(0.7, 40, 13.0, scaled=True)
    assert (m * math.exp(l)).real == pytest.approx(v, rel=1e-13)
    # very high degree stays finite in scaled form
    m, l = classical_eval(0.0, 5000, 1e5, scaled=True)
    assert math.isfinite(l) and abs(m) == pytest.approx(1.0)


def test_classical_coefficients_from_orthogonality():
    # low-degree textbook coefficients from direct moments
    a, b = classical_coeffs(0.4, 3)
    mu = [math.gamma(k + 1.4) for k in range(6)]
    a0 = mu[1] / mu[0]
    assert a[0] == pytest.approx(a0, rel=1e-14)
    assert b[0] ** 2 == pytest.approx(mu[2] / mu[0] - a0 ** 2, rel=1e-13)


def test_stieltjes_classical():
    t = stieltjes_coeffs(classical(0.0), 20, digits=16)
    a, b = classical_coeffs(0.0, 20)
    assert np.max(np.abs(t.a - a) / a) <= 1e-13
    assert np.max(np.abs(t.b - b) / b) <= 1e-13
    assert t.mu0 == pytest.approx(1.0, rel=1e-14)


def test_stieltjes_classical_32_digits():
    t = stieltjes_coeffs(classical(0.3), 40, digits=32)
    k = np.arange(40)
    a_ref = 2 * k + 1.3
    assert np.max(np.abs(_dd(t.a, t.a_lo) - a_ref) / a_ref) <= 1e-24


def test_stieltjes_refinement_stable():
    w = monomial(2.8, 3, 0.7, -1.5)
    t1 = stieltjes_coeffs(w, 64, digits=32)
    t2 = stieltjes_coeffs(w, 64, digits=32, density=1.5, X=t1.X)
    da = np.max(np.abs(_dd(t1.a, t1.a_lo) - _dd(t2.a, t2.a_lo)) / np.abs(_dd(t2.a, t2.a_lo)))
    db = np.max(np.abs(_dd(t1.b, t1.b_lo) - _dd(t2.b, t2.b_lo)) / _dd(t2.b, t2.b_lo))
    assert max(da, db) < 1e-24


def test_hermite_map_through_table():
    t = stieltjes_coeffs(classical(-0.5), 24, digits=32)
    x = 1.1
    for n in (4, 12, 20):
        assert oracle_eval(t, n, x * x) == pytest.approx(hermite_recurrence(2 * n, x), rel=1e-12)


def test_oracle_eval_against_classical():
    t = oracle_table(classical(0.0), 50, digits=32)
    assert oracle_eval(t, 50, 37.2) == pytest.approx(classical_eval(0.0, 50, 37.2), rel=1e-12)
    assert oracle_eval(t, 0, 3.0) == pytest.approx(1 / math.sqrt(t.mu0), rel=1e-15)
    z = 20 + 3j
    assert abs(oracle_eval(t, 30, z) - classical_eval(0.0, 30, z)) <= 1e-12 * abs(classical_eval(0.0, 30, z))
    with pytest.raises(DegreeExceedsTable):
        oracle_eval(t, t.N + 1, 1.0)


def test_orthonormality_from_table():
    w = monomial(0.5, 2, 1.0)
    t = oracle_table(w, 8, digits=16)
    for j, k in ((3, 3), (3, 5), (0, 7)):
        val = integrate_weight(w, lambda x, j=j, k=k: oracle_eval(t, j, float(x)) * oracle_eval(t, k, float(x)))
        assert val == pytest.approx(1.0 if j == k else 0.0, abs=1e-12)


def test_monic_and_orthonormal_differ_by_leading_coefficient():
    t = oracle_table(classical(0.0), 10, digits=16)
    n, x = 6, 4.5
    gamma = 1 / math.factorial(n)
    # monic pi_n = p_n / gamma_n; the classical monic Laguerre is (-1)^n n! L_n
    ln = sum((-1) ** k * math.comb(n, k) * x ** k / math.factorial(k) for k in range(n + 1))
    assert oracle_eval(t, n, x) / gamma == pytest.approx((-1) ** n * math.factorial(n) * ln, rel=1e-12)


def test_integrate_weight():
    assert integrate_weight(classical(0.0)) == pytest.approx(1.0, rel=1e-14)
    assert integrate_weight(classical(0.0), lambda x: x) == pytest.approx(1.0, rel=1e-14)
    w = monomial(2.8, 3, 0.7, -1.5)
    a = integrate_weight(w)
    b = integrate_weight(w, pieces=32)
    assert a == pytest.approx(b, rel=1e-12)
    ref = math.exp(1.5) * math.gamma(3.8 / 3) / (3 * 0.7 ** (3.8 / 3))
    assert a == pytest.approx(ref, rel=1e-12)


def test_oracle_p_dispatch():
    assert oracle_p(classical(0.0), 5, 2.0) == classical_eval(0.0, 5, 2.0)
    with pytest.raises(AlphaOutOfRange):
        oracle_p(formal_weight(-1.1, [0, 1]), 3, 1.0)
    with pytest.raises(AlphaOutOfRange):
        integrate_weight(formal_weight(-1.1, [0, 1]))


def test_precision_limits():
    custom = WeightSpec(0.0, QKind.GENERAL, (), lambda z: (np.exp(z), np.exp(z)), name="custom")
    with pytest.raises(PrecisionUnreachable):
        stieltjes_coeffs(custom, 10, digits=32)
    with pytest.raises(PrecisionUnreachable):
        stieltjes_coeffs(classical(0.0), 10, digits=20)
    t = stieltjes_coeffs(exp_weight(0.0), 10, digits=32)
    assert t.N == 10 and np.all(t.b > 0)


def test_table_validation():
    with pytest.raises(ValueError):
        RecurrenceTable(np.array([1.0]), np.array([-1.0]), 16, 1.0)


def test_hermite_recurrence_normalization():
    # int H_n^2 e^{-x^2} = 1 by Gauss-Hermite quadrature
    x, wt = np.polynomial.hermite.hermgauss(60)
    for n in (0, 5, 31):
        assert np.sum(wt * hermite_recurrence(n, x) ** 2) == pytest.approx(1.0, rel=1e-12)
