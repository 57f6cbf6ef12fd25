import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagasy.errors import AlphaOutOfRange, MalformedSpec, NonPositiveLeading
from lagasy.weight import (QKind, WeightSpec, classical, exp_weight, formal_weight,
                           parse_weight, polynomial, require_integrable, rescaled_field)


def test_parse_classical_alias():
    w = parse_weight("alpha=0;Q=classical")
    assert w.alpha == 0 and w.m == 1 and w.coeffs == (0.0, 1.0)


def test_parse_monomial_with_constant():
    w = parse_weight("alpha=2.8;Q=mono:3,0.7,-1.5")
    assert w.qkind is QKind.MONOMIAL
    assert w.m == 3 and w.coeffs[3] == 0.7 and w.q0 == -1.5


def test_parse_poly_and_exp():
    w = parse_weight("alpha=0.5;Q=poly:1,2,3")
    assert w.coeffs == (1.0, 2.0, 3.0) and w.qkind is QKind.POLYNOMIAL
    e = parse_weight("alpha=0;Q=exp")
    assert e.qkind is QKind.GENERAL and e.name == "exp"


@pytest.mark.parametrize("spec,exc", [
    ("alpha=-1.5;Q=classical", AlphaOutOfRange),
    ("alpha=-1;Q=classical", AlphaOutOfRange),
    ("alpha=0;Q=poly:1,-2", NonPositiveLeading),
    ("alpha=0;Q=mono:2,0", NonPositiveLeading),
    ("alpha=0;Q=poly:1", MalformedSpec),
    ("alpha=0;Q=mono:x,1", MalformedSpec),
    ("alpha=0;Q=bogus", MalformedSpec),
    ("garbage", MalformedSpec),
])
def test_parse_errors(spec, exc):
    with pytest.raises(exc):
        parse_weight(spec)


def test_monomial_rejects_middle_terms():
    with pytest.raises(MalformedSpec):
        WeightSpec(0.0, QKind.MONOMIAL, (0.0, 1.0, 1.0))


def test_json_form():
    w = parse_weight('{"alpha": 0.3, "Q": {"type": "mono", "coeffs": [0, 0, 1]}}')
    assert w.m == 2 and w.alpha == 0.3
    assert parse_weight(str(w.to_json()).replace("'", '"')) == w


def test_rescaled_field_examples():
    assert rescaled_field(classical(0.0), 10, 40.0, 0.5) == pytest.approx(2.0, rel=1e-15)
    mono2 = parse_weight("alpha=0;Q=mono:2,1")
    assert rescaled_field(mono2, 6, 4.0, 1.0) == pytest.approx(16 / 6, rel=1e-15)
    assert np.real(rescaled_field(exp_weight(0.0), 5, 3.0, 0.0)) == pytest.approx(0.2, rel=1e-15)


def test_general_field_finite_difference_derivative():
    w = WeightSpec(0.0, QKind.GENERAL, (), lambda z: (np.exp(z) + z, None), name="custom")
    assert w.dQ(1.3) == pytest.approx(math.exp(1.3) + 1, rel=1e-8)


def test_formal_weight_is_not_integrable():
    w = formal_weight(-1.1, [9, 0, -6, 3, 0, -2.1, 1])
    assert w.formal and w.m == 6
    with pytest.raises(AlphaOutOfRange):
        require_integrable(w)
    require_integrable(classical(0.0))


coeff = st.floats(min_value=-5, max_value=5, allow_nan=False, allow_infinity=False)
lead = st.floats(min_value=1e-3, max_value=5, allow_nan=False)
alphas = st.floats(min_value=-0.999, max_value=10, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(alphas, st.lists(coeff, min_size=1, max_size=6), lead)
def test_render_round_trip_polynomial(a, low, top):
    w = polynomial(a, low + [top])
    assert parse_weight(w.render()) == w


@settings(max_examples=50, deadline=None)
@given(alphas, st.integers(1, 8), lead, coeff)
def test_render_round_trip_monomial(a, m, qm, q0):
    w = parse_weight(f"alpha={a!r};Q=mono:{m},{qm!r},{q0!r}")
    assert parse_weight(w.render()) == w


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=1, max_size=5), lead,
       st.integers(1, 1000), st.floats(0.1, 100), st.floats(0, 1))
def test_field_real_and_bounded_below(low, top, n, beta, z):
    w = polynomial(0.0, low + [top])
    v = rescaled_field(w, n, beta, z)
    assert np.isrealobj(v) or abs(np.imag(v)) == 0
    assert v >= w.q0 / n - 1e-12 * (1 + abs(v))
