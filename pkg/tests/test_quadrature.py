import math

import numpy as np
import pytest

from lagasy.errors import AlphaOutOfRange
from lagasy.oracle import classical_coeffs
from lagasy.quadrature import (bessel_zeros, check_rule, gauss_rule, oracle_rule, recurrence_rule,
                               weight_mass)
from lagasy.specfun import bessel_j
from lagasy.weight import classical, formal_weight, monomial, polynomial


def test_two_point_rule():
    r = gauss_rule(classical(0.0), 2)
    s = math.sqrt(2)
    assert np.allclose(r.nodes, [2 - s, 2 + s], rtol=1e-15)
    assert np.allclose(r.weights, [(2 + s) / 4, (2 - s) / 4], rtol=1e-14)
    c = check_rule(r, 10)
    assert c["degree"] == 3 and c["max_residual"] <= 1e-14
    assert c["positive"] and c["mass_error"] <= 1e-15


def test_rule_at_n100_all_terms():
    r = gauss_rule(classical(0.0), 100)
    c = check_rule(r, 21)
    assert abs(np.sum(r.weights) - 1) <= 1e-12
    assert c["max_residual"] <= 1e-11
    assert c["positive"] and c["increasing"]


def test_rule_at_n100_truncated():
    # moment errors follow the expansion error O(n^{-T}); five terms reach roundoff
    errs = [check_rule(gauss_rule(classical(0.0), 100, T=T), 21)["max_residual"] for T in (2, 3, 4)]
    assert errs[0] > 10 * errs[1] > 100 * errs[2]
    r = gauss_rule(classical(0.0), 100, T=5)
    assert abs(np.sum(r.weights) - 1) <= 1e-12
    assert check_rule(r, 21)["max_residual"] <= 1e-11


def test_nodes_match_reference_rule():
    ref = oracle_rule(classical(0.0), 100)
    r = gauss_rule(classical(0.0), 100)
    assert np.max(np.abs(r.nodes - ref.nodes) / ref.nodes) <= 1e-10


def test_largest_node_n1000():
    n = 1000
    r = gauss_rule(classical(0.0), n)
    a, b = classical_coeffs(0.0, n)
    x, _ = recurrence_rule(a, b, 1.0)
    assert abs(r.nodes[-1] - x[-1]) / x[-1] <= 1e-6
    nu = 4 * n + 2
    airy = nu + 2 ** (2 / 3) * -2.338107410459767 * nu ** (1 / 3)
    assert abs(r.nodes[-1] - airy) / airy <= 1e-3


@pytest.mark.parametrize("w", [monomial(2.8, 3, 0.7, -1.5), polynomial(-0.5, [0.0, 1.0, 0.3]),
                               classical(2.5)])
def test_nonclassical_rules_match_reference(w):
    n = 100
    r = gauss_rule(w, n)
    ref = oracle_rule(w, n)
    assert np.max(np.abs(r.nodes - ref.nodes) / ref.nodes) <= 1e-10
    big = ref.weights > 1e-200
    assert np.max(np.abs(r.weights[big] - ref.weights[big]) / ref.weights[big]) <= 1e-8
    assert abs(np.sum(r.weights) - r.mu0) / r.mu0 <= 1e-11


def test_small_degree_needs_more_terms():
    # at n = 48 the default eight stored terms leave ~1e-10 errors in the upper bulk
    w = classical(2.5)
    ref = oracle_rule(w, 48)
    errs = {K: np.max(np.abs(gauss_rule(w, 48, K=K).nodes - ref.nodes) / ref.nodes) for K in (8, 12)}
    assert errs[12] <= 1e-12 < errs[8]


def test_weight_mass():
    assert weight_mass(classical(0.0)) == 1.0
    assert weight_mass(classical(1.5, q0=0.5)) == pytest.approx(math.gamma(2.5) * math.exp(-0.5), rel=1e-14)
    with pytest.raises(AlphaOutOfRange):
        gauss_rule(formal_weight(-1.1, [0, 1]), 20)


def test_log_weights_cover_underflow():
    r = gauss_rule(classical(0.0), 2000)
    assert np.any(r.weights == 0)
    assert np.all(np.isfinite(r.log_weights))
    assert np.all(np.diff(r.nodes) > 0)


def test_bessel_zeros():
    z = bessel_zeros(0.3, 6)
    assert np.all(np.abs(bessel_j(0.3, z)) <= 1e-14)
    assert np.all(np.diff(z) > 0)


def test_small_n_uses_reference():
    for n in (1, 3, 7):
        r = gauss_rule(classical(0.7), n)
        assert check_rule(r, 2 * n - 1)["max_residual"] <= 1e-13
