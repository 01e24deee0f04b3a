"""Closed-form monomial norms, L^q quasi-norms and the triple-stroke norms.

Every quasi-norm here is taken over the unit cube, which has unit
volume, so a constant ``c`` always has norm ``|c|``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .poly import Polynomial, decompose, gradient, higher_gradient
from .quadrature import (
    DEFAULT_TOL,
    SignError,
    integrate_exact_integer,
    integrate_power,
    integrate_power_mc,
)

METHODS = ("auto", "closed", "exact", "quad", "mc")
DEFAULT_MC_SAMPLES = 200_000


def monomial_norm_closed(alpha: Sequence[int], q: float) -> float:
    """``||x^alpha||_{L^q}`` = prod_j (q alpha_j + 1)^(-1/q)."""
    if q <= 0:
        raise ValueError("q must be positive")
    out = 1.0
    for a in alpha:
        if a:
            out *= (q * a + 1.0) ** (-1.0 / q)
    return out


def _grad_sum(alpha: Sequence[int], p: float) -> float:
    # sum over active coordinates of a^p (p a + 1) / (p (a - 1) + 1)
    return sum(a**p * (p * a + 1.0) / (p * (a - 1) + 1.0) for a in alpha if a)


def monomial_gradient_norm_closed(alpha: Sequence[int], p: float) -> float:
    """``(sum_j ||D_j x^alpha||_p^p)^(1/p)`` in closed form.

    Uses the correction factor ``(p a_j + 1) / (p (a_j - 1) + 1)``, which
    stays finite at ``a_j = 1``. Returns 0 for the constant monomial.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    s = _grad_sum(alpha, p)
    if s == 0.0:
        return 0.0
    prod = 1.0
    for a in alpha:
        if a:
            prod *= (p * a + 1.0) ** (-1.0 / p)
    return s ** (1.0 / p) * prod


def _power_integral_closed(f: Polynomial, q: float) -> float:
    (alpha, c), = f.items()
    out = abs(c) ** q
    for a in alpha:
        if a:
            out /= q * a + 1.0
    return out


def _resolve(f: Polynomial, q: float, method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method != "auto":
        return method
    if f.is_monomial():
        return "closed"
    if float(q) in (1.0, 2.0, 3.0):
        return "exact"
    return "quad"


@lru_cache(maxsize=65536)
def _power_integral(f: Polynomial, q: float, method: str, tol: float, mc_n: int, mc_seed: int) -> float:
    if f.is_zero():
        return 0.0
    how = _resolve(f, q, method)
    if how == "closed":
        if not f.is_monomial():
            raise ValueError("closed form needs a single monomial")
        return _power_integral_closed(f, q)
    if how == "exact":
        if float(q) not in (1.0, 2.0, 3.0):
            raise ValueError(f"exact method needs q in {{1, 2, 3}}, got {q}")
        if f.sign() == 0:
            raise SignError(f"integrand is not sign-definite: {f.pretty()}")
        g = -f if f.sign() < 0 else f
        return float(integrate_exact_integer(g, int(q)))
    if how == "mc":
        return integrate_power_mc(f, q, mc_n, mc_seed).value
    return integrate_power(f, q, tol).value


def power_integral(
    f: Polynomial,
    q: float,
    method: str = "auto",
    tol: float = DEFAULT_TOL,
    *,
    mc_n: int = DEFAULT_MC_SAMPLES,
    mc_seed: int = 0,
) -> float:
    """``int |f|^q`` for sign-definite ``f``, dispatched by ``method``.

    ``auto`` picks the closed form for a single monomial, exact rational
    integration for ``q`` in {1, 2, 3}, graded quadrature otherwise.
    Results are memoised; all inputs are immutable.
    """
    return _power_integral(f, float(q), method, float(tol), int(mc_n), int(mc_seed))


def lq_quasinorm(f: Polynomial, q: float, method: str = "auto", tol: float = DEFAULT_TOL, **mc) -> float:
    """``(int |f|^q)^(1/q)`` for a sign-definite polynomial ``f``."""
    return power_integral(f, q, method, tol, **mc) ** (1.0 / float(q))


def triple_stroke_norm(P: Polynomial, q: float, tol: float = DEFAULT_TOL, method: str = "auto", **mc) -> float:
    """``|p0| + ||P+||_q + ||P-||_q`` with the sign parts kept apart."""
    d = decompose(P)
    return (
        abs(d.p0)
        + lq_quasinorm(d.plus, q, method, tol, **mc)
        + lq_quasinorm(-d.minus, q, method, tol, **mc)
    )


def gradient_lp_norm(Q: Polynomial, p: float, tol: float = DEFAULT_TOL, method: str = "auto", **mc) -> float:
    """``(sum_j int |D_j Q|^p)^(1/p)`` for sign-definite ``Q``."""
    total = sum(power_integral(g, p, method, tol, **mc) for g in gradient(Q))
    return total ** (1.0 / float(p))


def gradient_triple_norm(P: Polynomial, p: float, tol: float = DEFAULT_TOL, method: str = "auto", **mc) -> float:
    """``||grad P+||_p + ||grad P-||_p``.

    The sign split happens before differentiation, so each ``D_j P+`` has
    non-negative coefficients and constants created by differentiation
    are never re-split.
    """
    d = decompose(P)
    return gradient_lp_norm(d.plus, p, tol, method, **mc) + gradient_lp_norm(-d.minus, p, tol, method, **mc)


def m_gradient_lp_norm(Q: Polynomial, p: float, m: int, tol: float = DEFAULT_TOL, method: str = "auto", **mc) -> float:
    total = sum(power_integral(g, p, method, tol, **mc) for g in higher_gradient(Q, m).values())
    return total ** (1.0 / float(p))


def m_gradient_triple_norm(
    P: Polynomial, p: float, m: int, tol: float = DEFAULT_TOL, method: str = "auto", **mc
) -> float:
    """``||D^m P+||_p + ||D^m P-||_p`` summing every ``|beta| = m`` once."""
    if m == 1:
        return gradient_triple_norm(P, p, tol, method, **mc)
    d = decompose(P)
    return m_gradient_lp_norm(d.plus, p, m, tol, method, **mc) + m_gradient_lp_norm(
        -d.minus, p, m, tol, method, **mc
    )


def lq_norm_signed(P: Polynomial, q: float) -> float:
    """Ordinary ``||P||_{L^q}`` of a possibly sign-changing polynomial.

    Auxiliary for comparisons only; uses a fixed fine tensor Gauss rule
    on uniform panels, so it is meant for small polynomials in low
    dimension.
    """
    import numpy as np

    from .poly import evaluate_points

    t, w = np.polynomial.legendre.leggauss(20)
    # |P| has kinks on the zero set, so panels are needed even for integer q
    panels = 16
    edges = np.linspace(0.0, 1.0, panels + 1)
    x = np.concatenate([0.5 * (a + b) + 0.5 * (b - a) * t for a, b in zip(edges[:-1], edges[1:])])
    wx = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    grids = np.meshgrid(*([x] * P.dim), indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1)
    W = wx
    for _ in range(P.dim - 1):
        W = np.multiply.outer(W, wx)
    vals = np.abs(evaluate_points(P, X)) ** q
    return float(np.dot(W.ravel(), vals)) ** (1.0 / q)


def clear_cache() -> None:
    _power_integral.cache_clear()

