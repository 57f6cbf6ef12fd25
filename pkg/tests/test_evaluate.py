import math

import numpy as np
import pytest

from lagasy.evaluate import (Evaluator, Region, Regions, ScaledValue, classify, classify_array,
                             deriv_pn, evaluate, hermite_eval)
from lagasy.oracle import classical_eval, hermite_recurrence, oracle_p
from lagasy.quadrature import gauss_rule
from lagasy.suites import fit_slope
from lagasy.weight import classical, polynomial


def _oracle(alpha, n, x, q0=0.0):
    m, l = classical_eval(alpha, n, x, q0, scaled=True)
    return ScaledValue(m, l)


def test_classify_examples():
    assert classify(0.5) is Region.LENS
    assert classify(1.01) is Region.RIGHT
    assert classify(-2) is Region.OUTER
    assert classify(0.05j) is Region.LEFT
    assert list(classify_array([0.5, 1.01, -2, 0.05j])) == ["lens", "right", "outer", "left"]
    with pytest.raises(ValueError):
        Regions(r_left=0.6)


@pytest.fixture(scope="module")
def ev100():
    return Evaluator(classical(0.0), 100)


def test_lens_accuracy(ev100):
    x = 0.25 * 400
    ref = _oracle(0.0, 100, x)
    # one and three correction terms beyond the identity
    assert ev100.at_z(0.25, T=2).rel_diff(ref) <= 1e-3
    assert ev100.at_z(0.25, T=4).rel_diff(ref) <= 1e-8


def test_realness_lens():
    ev = Evaluator(classical(0.0), 200)
    m, l = ev.at_z(np.linspace(0.25, 0.75, 200), T=3)
    assert np.all(np.abs(m.imag) <= 1e-10)


def test_outer_leading_behaviour():
    n = 20
    ev = Evaluator(classical(0.0), n)
    z = 1e4 * np.exp(0.3j)
    x = ev.beta * z
    v = ev.at_z(z, T=2)
    lg = ev.gamma_log(T=2)
    ratio = v.mantissa * np.exp(v.log_scale - lg - n * np.log(x))
    # p_n(x) / (gamma_n x^n) = 1 - (sum of zeros)/x + O(x^{-2}); the zeros sum to n(n + alpha)
    assert abs(ratio - (1 - n * n / x)) <= 1e-6


def test_outer_against_oracle(ev100):
    z = 2 + 0.5j
    assert ev100.at_z(z, T=3).rel_diff(_oracle(0.0, 100, 400 * z)) <= 1e-8


@pytest.mark.parametrize("z", [2 + 0.5j, 0.5 + 0.05j, 0.05 + 0.02j, 1.05 + 0.1j])
def test_conjugate_symmetry(ev100, z):
    a = ev100.at_z(z, T=3)
    b = ev100.at_z(np.conj(z), T=3)
    assert b.rel_diff(ScaledValue(np.conj(a.mantissa), a.log_scale)) <= 1e-13


def test_region_formulas_agree_on_overlap():
    # the same point evaluated with the disk formula and with the neighbouring formula
    w = classical(0.3)
    small = Evaluator(w, 300, regions=Regions(r_left=0.1, r_right=0.1))
    big = Evaluator(w, 300, regions=Regions(r_left=0.3, r_right=0.3))
    for z in (0.2, 0.2 + 0.05j, 0.8, 0.85 + 0.02j, 1.2, 1.15 - 0.1j):
        assert small.at_z(z, T=None).rel_diff(big.at_z(z, T=None)) <= 1e-9


def test_largest_zero_location():
    n, a = 1000, 0.0
    ev = Evaluator(classical(a), n)
    nu = 4 * n + 2 * a + 2
    guess = nu + 2 ** (2 / 3) * -2.338107410459767 * nu ** (1 / 3)
    x = np.linspace(guess * 0.995, guess * 1.005, 801)
    m, l = ev.at_x(x, T=3)
    s = np.sign(m.real)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    assert len(idx) >= 1
    root = x[idx[-1]]
    assert abs(root - guess) / guess <= 1e-3
    rule = gauss_rule(classical(a), n)
    assert abs(rule.nodes[-1] - root) <= x[1] - x[0]


def test_soft_edge_convergence_half_integer():
    # x = 0.97 beta_n with alpha = -1/2: error falls like n^{-T}
    ns = [2 ** k for k in range(5, 11)]
    for T in (1, 2, 3):
        errs = [Evaluator(classical(-0.5), n).at_z(0.97, T=T).rel_diff(_oracle(-0.5, n, 0.97 * 4 * n))
                for n in ns]
        assert abs(fit_slope(ns, errs) + T) <= 0.4


def test_hard_edge_values():
    ev = Evaluator(classical(0.0), 200)
    # alpha = 0: p_n(0) = (-1)^n
    assert ev.at_z(0.0, T=3).rel_diff(1.0) <= 1e-8
    assert Evaluator(classical(0.0), 1024).at_z(0.001, T=3).rel_diff(_oracle(0.0, 1024, 4.096)) <= 1e-9


def test_gamma_and_recurrence():
    n = 500
    ev = Evaluator(classical(0.0), n)
    exact = -(math.lgamma(n + 1) + math.lgamma(n + 1)) / 2
    assert abs(ev.gamma_log(T=3) - exact) <= 1e-8
    a, b = ev.recurrence(T=3)
    assert abs(a - (2 * n + 1)) / (2 * n + 1) <= 1e-8
    assert abs(b - n) / n <= 1e-8
    assert a / ev.beta == pytest.approx(0.5, abs=1e-3)
    assert b / ev.beta == pytest.approx(0.25, abs=1e-3)


def test_gamma_q0_shift():
    a = Evaluator(classical(0.3), 100).gamma_log(T=3)
    b = Evaluator(classical(0.3, q0=3.0), 100).gamma_log(T=3)
    assert b - a == pytest.approx(1.5, abs=1e-12)


def test_gamma_leading_order_rate():
    ns = [2 ** k for k in range(5, 11)]
    errs = []
    for n in ns:
        exact = -(math.lgamma(n + 1) + math.lgamma(n + 1.3)) / 2
        errs.append(abs(Evaluator(classical(0.3), n).gamma_log(T=1) - exact))
    assert abs(fit_slope(ns, errs) + 1) <= 0.1


def test_evaluate_polynomial_weight_against_oracle():
    w = polynomial(0.5, [0.0, 1.0, 0.3])
    n = 60
    ref = oracle_p(w, n, 0.4 * Evaluator(w, n).beta, scaled=True)
    v = evaluate(w, n, 0.4 * Evaluator(w, n).beta, T=None)
    assert v.rel_diff(ScaledValue(*ref)) <= 1e-9


def test_hermite_identity_and_asymptotics():
    for n in (3, 17, 50):
        for x in (0.3, 1.7):
            h = hermite_recurrence(2 * n, x)
            l = oracle_p(classical(-0.5), n, x * x)
            assert abs(h - l) <= 1e-10 * max(1.0, abs(h))
    ns = [2 ** k for k in range(5, 10)]
    for T in (1, 2, 3):
        errs = []
        for n in ns:
            x = math.sqrt(3.88 * n)
            ref = ScaledValue(*hermite_recurrence(2 * n, x, scaled=True))
            errs.append(hermite_eval(2 * n, x, T=T).rel_diff(ref))
        assert abs(fit_slope(ns, errs) + T) <= 0.4


def test_hermite_odd_degree_quartic():
    # exp(-x^4 + 3x^2), odd degree: alpha = 1/2 and Q(y) = y^2 - 3y
    w = polynomial(0.5, [0.0, -3.0, 1.0])
    errs = []
    ns = [16, 32, 64]
    for n in ns:
        ev = Evaluator(w, n)
        x = math.sqrt(0.31 * ev.beta)
        ref = ScaledValue(*oracle_p(w, n, x * x, scaled=True)) * x
        errs.append(hermite_eval(2 * n + 1, x, T=2, coeffs=(0.0, -3.0, 1.0)).rel_diff(ref))
    assert errs[-1] < errs[0] and errs[-1] <= 1e-3


def test_derivative():
    w = classical(0.0)
    assert deriv_pn(w, 1, 3.0).rel_diff(1.0) <= 1e-14
    n, x = 100, 200.0
    h = 1e-5 * x
    fd = (classical_eval(0.0, n, x + h) - classical_eval(0.0, n, x - h)) / (2 * h)
    assert deriv_pn(w, n, x, T=None).rel_diff(fd) <= 1e-6
    rule = gauss_rule(w, n)
    m, l = deriv_pn(w, n, rule.nodes, T=3)
    assert np.all(np.abs(m) > 0.5)
