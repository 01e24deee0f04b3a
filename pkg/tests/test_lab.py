import math
from fractions import Fraction

import numpy as np
import pytest

from poincare_lab.exponents import SobolevParams
from poincare_lab.lab import (
    WindowError,
    exponent_gap,
    lp_norm,
    mean_inequality_checks,
    mediant_reduction_check,
    monomial_ratio,
    monomial_ratio_sup,
    poly_id,
    proof_chain_scan,
    proof_factor,
    second_factor,
    verify_embedding,
    verify_higher,
    verify_poincare,
)
from poincare_lab.poly import Polynomial, variables
from poincare_lab.search import SamplerConfig, random_suite


def e1_sup(params):
    ps = params.p_star_f
    return (ps + 1.0) ** (-1.0 / ps)


# -- monomials ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "N, p, expected",
    [
        (2, Fraction(2, 3), 0.5),
        (3, Fraction(3, 4), 0.5),
        (2, Fraction(9, 10), 0.5529921617477526),
        (1, Fraction(9, 10), 0.7742636826811271),
    ],
)
def test_monomial_ratio_e1(N, p, expected):
    par = SobolevParams(N, p)
    alpha = (1,) + (0,) * (N - 1)
    assert monomial_ratio(alpha, par) == pytest.approx(expected, rel=1e-14)
    assert e1_sup(par) == pytest.approx(expected, rel=1e-14)


def test_monomial_ratio_rejects_zero_and_bad_length():
    par = SobolevParams(2, 0.9)
    with pytest.raises(ValueError):
        monomial_ratio((0, 0), par)
    with pytest.raises(ValueError):
        monomial_ratio((1,), par)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("p", ["b", 0.9, 0.97])
def test_monomial_sup_at_e1(N, p):
    par = SobolevParams.boundary(N) if p == "b" else SobolevParams(N, p)
    scan = monomial_ratio_sup(par, 12)
    assert sum(scan.argmax) == 1
    assert scan.sup == pytest.approx(e1_sup(par), rel=1e-13)
    assert scan.sup == pytest.approx(monomial_ratio(scan.argmax, par), rel=1e-13)


def test_monomial_sup_box_independent():
    par = SobolevParams(2, 0.8)
    a, b = monomial_ratio_sup(par, 30), monomial_ratio_sup(par, 60)
    assert abs(a.sup - b.sup) <= 1e-12
    perm = a.argmax[::-1]
    assert a.ratios[perm] == a.sup


def test_monomial_scan_matches_scalar():
    par = SobolevParams(2, 0.8)
    scan = monomial_ratio_sup(par, 5)
    rows = list(scan.rows())
    assert len(rows) == 35
    for alpha, _, _, r in rows:
        assert r == pytest.approx(monomial_ratio(alpha, par), rel=1e-13)


# -- proof chain -------------------------------------------------------------------------


def test_exponent_gap_is_one_over_N():
    for N in range(1, 6):
        assert exponent_gap(SobolevParams(N, Fraction(N, N + 1) + Fraction(1, 100))) == Fraction(1, N)


def test_proof_factor_at_zero():
    assert proof_factor(0, SobolevParams(3, 0.9)) == 1.0


def test_proof_factor_growth():
    par = SobolevParams(2, 0.8)
    v = proof_factor(16, par) / 16 ** (1 / 2)
    assert 0 < v <= 4
    a = 2**10
    for N in (1, 2, 3):
        par = SobolevParams(N, 0.9)
        assert proof_factor(2 * a, par) / proof_factor(a, par) == pytest.approx(2 ** (1 / N), rel=0.05)


def test_second_factor_single_coordinate():
    p, a = 0.8, 7
    expected = (a**p * (p * a + 1) / (p * (a - 1) + 1)) ** (-1 / p)
    assert second_factor((0, a, 0), p) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(ValueError):
        second_factor((0, 0), p)


@pytest.mark.parametrize("p", [0.5, 0.8, 0.97])
def test_second_factor_examples(p):
    assert second_factor((1, 0), p) == pytest.approx((p + 1) ** (-1 / p), rel=1e-15)
    for N in (1, 2, 3, 4):
        v = second_factor((1,) * N, 0.9)
        assert v == pytest.approx((N * 1.9) ** (-1 / 0.9), rel=1e-14)
        assert v <= N ** (-1 / 0.9)


def test_mean_checks_equality_cases():
    c = mean_inequality_checks((5, 5, 5), 0.8)
    assert c.amgm_ok and c.amgm_margin == 0.0
    c = mean_inequality_checks((1, 0, 0), 0.8)
    assert c.lq_ok and c.lq_margin == 0.0


def test_mean_checks_example():
    c = mean_inequality_checks((3, 4), 0.8)
    assert c.amgm_ok and c.lq_ok and c.second_ok
    # AM^2 - GM^2 = 49/4 - 12
    assert c.amgm_margin == pytest.approx(0.25)
    assert c.lq_margin > 0 and c.second_margin > 0


def test_lp_norm_single_support_exact():
    assert lp_norm((0, 17, 0), 0.77) == 17.0
    assert mean_inequality_checks((0, 17, 0), 0.77).lq_margin == 0.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_proof_chain_scan_agrees_with_scalar(N):
    par = SobolevParams(N, 0.85 if N > 1 else 0.6)
    scan = proof_chain_scan(par, 6)
    assert scan.ok
    assert scan.count == 7**N - 1
    worst = min(
        mean_inequality_checks(a, par.pf).second_margin
        for a in (tuple(int(c) for c in idx) for idx in np.ndindex(*(7,) * N))
        if any(a)
    )
    assert scan.min_second_margin == pytest.approx(worst, rel=1e-9, abs=1e-15)


# -- polynomial verifiers ----------------------------------------------------------------


def test_verify_poincare_examples():
    x, y = variables(2)
    par = SobolevParams.boundary(2)
    assert verify_poincare(x, par).ratio == pytest.approx(0.5, rel=1e-15)
    assert verify_poincare(x - y, par).ratio == pytest.approx(0.5, rel=1e-15)
    rep = verify_poincare(Polynomial.constant(2, 3.0), par)
    assert rep.degenerate and rep.ratio is None


def test_verify_window_enforced():
    x, _ = variables(2)
    with pytest.raises(WindowError):
        verify_poincare(x, SobolevParams(2, 0.5))
    rep = verify_poincare(x, SobolevParams(2, 0.5), exploratory=True)
    assert rep.exploratory and rep.ratio > 0
    with pytest.raises(ValueError):
        verify_poincare(x, SobolevParams(3, 0.9, 2))


def test_verify_ignores_constant_term():
    x, y = variables(2)
    par = SobolevParams(2, 0.9)
    P = 2 * x * y - y**3
    assert verify_poincare(P + 5, par).ratio == pytest.approx(verify_poincare(P, par).ratio, rel=1e-15)


def test_verify_higher_example():
    x, y, _ = variables(3)
    par = SobolevParams(3, 0.9, 2)
    ps, p = 2.25, 0.9
    lhs = (1 / ((2 * ps + 1) * (ps + 1))) ** (1 / ps)
    # D^2: 2y and 2x, each with int (2t)^p = 2^p / (p + 1)
    rhs = (2 * 2**p / (p + 1)) ** (1 / p)
    rep = verify_higher(x * x * y, par)
    assert rep.lhs == pytest.approx(lhs, rel=1e-13)
    assert rep.rhs == pytest.approx(rhs, rel=1e-13)
    assert verify_higher(1 + x + y, par).degenerate


def test_verify_higher_m1_matches_first_order():
    par = SobolevParams(2, 0.9)
    for _, _, P in random_suite(SamplerConfig(2, 5, 4, seed=5), 10):
        a, b = verify_higher(P, par).ratio, verify_poincare(P, par).ratio
        assert a == pytest.approx(b, rel=1e-12)


def test_verify_embedding_example():
    x, _ = variables(2)
    par = SobolevParams.boundary(2)
    rep = verify_embedding(x, par)
    assert rep.lhs == pytest.approx(0.5, rel=1e-15)
    assert rep.extras["constant_norm_equal"] and rep.extras["constant_bounded"]
    rep = verify_embedding(3 - x, par)
    assert rep.extras["constant_norm_equal"] and rep.extras["constant_bounded"]


def test_mediant_example():
    x, y = variables(2)
    par = SobolevParams(2, 0.9)
    chk = mediant_reduction_check(2 * x * y - x**3 + 0.5 * y, par)
    assert chk.ok
    assert chk.ratio <= max(chk.ratio_plus, chk.ratio_minus)


def test_permutation_symmetry():
    par = SobolevParams(3, 0.9)
    P = Polynomial(3, {(2, 0, 1): 1.0, (0, 1, 0): -0.5, (1, 1, 1): 0.25})
    Q = Polynomial(3, {(a[2], a[0], a[1]): c for a, c in P.items()})
    assert verify_poincare(Q, par).ratio == pytest.approx(verify_poincare(P, par).ratio, rel=1e-8)


def test_poly_id_stable():
    x, y = variables(2)
    assert poly_id(x + y) == poly_id(y + x)
    assert poly_id(x + y) != poly_id(x - y)
    assert len(poly_id(x)) == 16


def test_report_serialises():
    x, _ = variables(2)
    d = verify_poincare(x, SobolevParams(2, 0.9)).to_dict()
    assert d["theorem"] == "1.3" and math.isfinite(d["ratio"])
    assert d["params"]["p"] == "9/10"
