from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poincare_lab.poly import (
    Polynomial,
    PolynomialError,
    decompose,
    differentiate,
    evaluate,
    evaluate_points,
    gradient,
    higher_gradient,
    multi_indices,
    partial,
    truncate_degree,
    variables,
)


def P2(terms):
    return Polynomial(2, terms)


# -- strategies -----------------------------------------------------------------

coef = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False).filter(
    lambda c: abs(c) > 1e-3
)


@st.composite
def polynomials(draw, dim=None, max_deg=4):
    N = dim if dim is not None else draw(st.integers(1, 3))
    alpha = st.tuples(*([st.integers(0, max_deg)] * N))
    terms = draw(st.dictionaries(alpha, coef, max_size=6))
    return Polynomial(N, terms)


# -- decomposition ------------------------------------------------------------------


def test_decompose_example():
    # 3 - 2x + xy
    d = decompose(P2({(0, 0): 3.0, (1, 0): -2.0, (1, 1): 1.0}))
    assert d.p0 == 3.0
    assert d.plus == P2({(1, 1): 1.0})
    assert d.minus == P2({(1, 0): -2.0})


def test_decompose_constant_only():
    d = decompose(Polynomial.constant(3, -5.0))
    assert d.p0 == -5.0
    assert d.plus.is_zero() and d.minus.is_zero()


@given(polynomials())
def test_decompose_reconstructs(P):
    d = decompose(P)
    assert d.recompose() == P
    assert d.p0 == P.constant_term


@given(polynomials())
def test_decompose_sign_purity(P):
    d = decompose(P)
    assert all(c > 0 for _, c in d.plus.items())
    assert all(c < 0 for _, c in d.minus.items())
    assert (0,) * P.dim not in dict(d.plus.items())
    assert (0,) * P.dim not in dict(d.minus.items())


@given(polynomials(), st.floats(min_value=1e-3, max_value=1e3))
def test_decompose_scaling(P, c):
    d, dpos, dneg = decompose(P), decompose(P.scale(c)), decompose(P.scale(-c))
    assert dpos.plus == d.plus.scale(c)
    assert dpos.minus == d.minus.scale(c)
    # negative scaling swaps the roles of the two parts
    assert dneg.plus == d.minus.scale(-c)
    assert dneg.minus == d.plus.scale(-c)


# -- differentiation ----------------------------------------------------------------


def test_differentiate_example():
    # d/dx (x^2 y + 4 y^3) = 2xy
    P = P2({(2, 1): 1.0, (0, 3): 4.0})
    assert differentiate(P, 0) == P2({(1, 1): 2.0})
    assert differentiate(P, 1) == P2({(2, 0): 1.0, (0, 2): 12.0})


def test_differentiate_constant_is_zero():
    assert differentiate(Polynomial.constant(2, 7.0), 1).is_zero()


def test_differentiate_bad_index():
    with pytest.raises(IndexError):
        differentiate(P2({(1, 0): 1.0}), 2)
    with pytest.raises(IndexError):
        differentiate(P2({(1, 0): 1.0}), -1)


@given(polynomials(dim=2), polynomials(dim=2), st.floats(-5, 5), st.integers(0, 1))
def test_differentiate_linear(P, Q, a, j):
    lhs = differentiate(P.scale(a) + Q, j)
    rhs = differentiate(P, j).scale(a) + differentiate(Q, j)
    x = (0.3, 0.7)
    assert evaluate(lhs, x) == pytest.approx(evaluate(rhs, x), rel=1e-9, abs=1e-9)


def test_gradient_and_partials():
    x, y = variables(2)
    P = x**2 * y + y
    g = gradient(P)
    assert g[0] == P2({(1, 1): 2.0})
    assert g[1] == P2({(2, 0): 1.0, (0, 0): 1.0})
    H = higher_gradient(P, 2)
    assert list(H) == multi_indices(2, 2)
    assert H[(2, 0)] == P2({(0, 1): 2.0})
    assert H[(1, 1)] == P2({(1, 0): 2.0})
    assert H[(0, 2)].is_zero()
    assert partial(P, (2, 1)) == Polynomial.constant(2, 2.0)


def test_truncate_degree():
    P = P2({(0, 0): 1.0, (1, 0): 2.0, (1, 1): 3.0, (0, 3): 4.0})
    low, rest = truncate_degree(P, 2)
    assert low == P2({(0, 0): 1.0, (1, 0): 2.0})
    assert rest == P2({(1, 1): 3.0, (0, 3): 4.0})


# -- evaluation ---------------------------------------------------------------------


def _eval_exact(P, x):
    total = Fraction(0)
    for alpha, c in P.items():
        t = Fraction(c)
        for xi, a in zip(x, alpha):
            t *= Fraction(xi) ** a
        total += t
    return total


@settings(max_examples=50)
@given(polynomials(), st.data())
def test_evaluate_matches_exact(P, data):
    x = data.draw(st.tuples(*([st.floats(0, 1)] * P.dim)))
    scale = sum(abs(c) for _, c in P.items()) or 1.0
    assert abs(evaluate(P, x) - float(_eval_exact(P, x))) <= 1e-12 * scale


def test_evaluate_points_matches_scalar():
    P = Polynomial(3, {(0, 0, 0): 1.0, (2, 1, 0): -2.5, (0, 0, 4): 0.25})
    X = np.random.default_rng(1).random((20, 3))
    v = evaluate_points(P, X)
    for row, val in zip(X, v):
        assert val == pytest.approx(evaluate(P, row), rel=1e-14)


def test_evaluate_dimension_mismatch():
    with pytest.raises(ValueError):
        evaluate(P2({(1, 0): 1.0}), (0.5,))


# -- construction and serialization -----------------------------------------------------


def test_zero_coefficients_dropped():
    P = P2({(1, 0): 0.0, (0, 1): 2.0})
    assert list(P.items()) == [((0, 1), 2.0)]


def test_duplicate_terms_rejected():
    with pytest.raises(PolynomialError):
        Polynomial.from_terms(2, [((1, 0), 1.0), ((1, 0), 2.0)])


def test_json_duplicate_alpha_diagnostic():
    d = {"dim": 2, "terms": [{"alpha": [1, 0], "coef": 1.0}, {"alpha": [1, 0], "coef": 2.0}]}
    with pytest.raises(PolynomialError, match=r"term #1.*duplicate.*term #0"):
        Polynomial.from_dict(d)


@pytest.mark.parametrize(
    "payload",
    [
        {"dim": 2, "terms": [{"alpha": [1], "coef": 1.0}]},
        {"dim": 2, "terms": [{"alpha": [1, -1], "coef": 1.0}]},
        {"dim": 0, "terms": []},
        {"dim": 2, "terms": [{"alpha": [1, 0], "coef": 0.0}]},
        {"dim": 2, "terms": [{"alpha": [1, 0], "coef": "x"}]},
    ],
)
def test_json_rejects_bad_payloads(payload):
    with pytest.raises(PolynomialError):
        Polynomial.from_dict(payload)


@given(polynomials())
def test_json_round_trip(P):
    assert Polynomial.from_dict(P.to_dict()) == P
    assert hash(Polynomial.from_dict(P.to_dict())) == hash(P)


def test_terms_sorted_grlex():
    P = P2({(0, 2): 1.0, (1, 0): 1.0, (2, 0): 1.0, (0, 0): 1.0, (1, 1): 1.0})
    assert [a for a, _ in P.items()] == [(0, 0), (1, 0), (2, 0), (1, 1), (0, 2)]


def test_sign():
    assert P2({(1, 0): 1.0, (0, 1): 2.0}).sign() == 1
    assert P2({(1, 0): -1.0}).sign() == -1
    assert P2({(1, 0): 1.0, (0, 1): -2.0}).sign() == 0
