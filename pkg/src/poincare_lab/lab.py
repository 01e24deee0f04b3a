"""Ratio reports for the Poincare / Sobolev-type inequalities.

Each verifier returns a :class:`RatioReport` holding both sides of one
inequality instance. The monomial helpers work from closed forms only;
the polynomial verifiers go through :mod:`poincare_lab.norms`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exponents import ExponentError, SobolevParams
from .norms import (
    gradient_triple_norm,
    lq_quasinorm,
    m_gradient_triple_norm,
    monomial_gradient_norm_closed,
    monomial_norm_closed,
    triple_stroke_norm,
)
from .poly import Polynomial, decompose, truncate_degree
from .quadrature import DEFAULT_TOL


class WindowError(ExponentError):
    """Parameters outside the hypothesis window of the selected theorem."""


def poly_id(P: Polynomial) -> str:
    blob = json.dumps(P.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RatioReport:
    params: SobolevParams
    poly_id: str
    lhs: float
    rhs: float
    ratio: float | None
    degenerate: bool
    theorem: str = "1.3"
    exploratory: bool = False
    extras: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        d = {
            "theorem": self.theorem,
            "params": self.params.to_dict(),
            "poly_id": self.poly_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "degenerate": self.degenerate,
            "exploratory": self.exploratory,
        }
        if self.extras:
            d["extras"] = dict(self.extras)
        return d


def _report(params, P, lhs, rhs, theorem, exploratory, **extras) -> RatioReport:
    degenerate = rhs == 0.0
    ratio = None if degenerate else lhs / rhs
    return RatioReport(params, poly_id(P), lhs, rhs, ratio, degenerate, theorem, exploratory, extras)


def _require_window(params: SobolevParams, theorem: str, exploratory: bool) -> None:
    w = params.window(theorem)
    if not w.ok and not exploratory:
        raise WindowError(
            f"(N={params.dim}, p={params.p}, m={params.m}) outside window of theorem {theorem}: {w.explain()}"
        )


# -- monomials -----------------------------------------------------------------


def monomial_ratio(alpha: Sequence[int], params: SobolevParams) -> float:
    """``||x^alpha||_{p*} / ||grad x^alpha||_p`` from the closed forms."""
    if not any(alpha):
        raise ValueError("monomial ratio is undefined for the zero multi-index")
    if len(alpha) != params.dim:
        raise ValueError("multi-index length does not match dimension")
    return monomial_norm_closed(alpha, params.p_star_f) / monomial_gradient_norm_closed(alpha, params.pf)


@dataclass
class MonomialScan:
    params: SobolevParams
    box: int
    sup: float
    argmax: tuple[int, ...]
    lhs: np.ndarray  # shape (K+1,)*N, closed-form L^{p*} norms
    grad: np.ndarray  # closed-form gradient L^p norms
    ratios: np.ndarray  # nan at the zero multi-index

    def rows(self):
        """``(alpha, lhs, grad, ratio)`` for every nonzero alpha, C order."""
        for idx in np.ndindex(*self.ratios.shape):
            if any(idx):
                yield idx, float(self.lhs[idx]), float(self.grad[idx]), float(self.ratios[idx])


def monomial_ratio_sup(params: SobolevParams, box_limit: int) -> MonomialScan:
    """Exhaustive scan of the monomial ratio over ``0 <= alpha_j <= K``.

    Vectorised: both closed forms are products / sums of per-coordinate
    factors, so the whole box is built by broadcasting.
    """
    if box_limit < 1:
        raise ValueError("box limit K must be >= 1")
    N, p, ps = params.dim, params.pf, params.p_star_f
    k = np.arange(box_limit + 1, dtype=float)
    lhs_f = (ps * k + 1.0) ** (-1.0 / ps)
    b_f = (p * k + 1.0) ** (-1.0 / p)
    g_f = np.where(k > 0, k**p * (p * k + 1.0) / (p * (k - 1.0) + 1.0), 0.0)

    def outer(vec, op):
        out = vec
        for _ in range(N - 1):
            out = op.outer(out, vec)
        return out

    lhs = outer(lhs_f, np.multiply)
    gsum = outer(g_f, np.add)
    with np.errstate(divide="ignore", invalid="ignore"):
        grad = gsum ** (1.0 / p) * outer(b_f, np.multiply)
        ratios = lhs / grad
    ratios[(0,) * N] = np.nan
    flat = int(np.nanargmax(ratios))
    argmax = tuple(int(i) for i in np.unravel_index(flat, ratios.shape))
    return MonomialScan(params, box_limit, float(ratios[argmax]), argmax, lhs, grad, ratios)


# -- steps of the monomial estimate ---------------------------------------------


def proof_factor(a: int, params: SobolevParams) -> float:
    """Per-coordinate factor ``(a p + 1)^(1/p) / (p* a + 1)^(1/p*)``."""
    p, ps = params.pf, params.p_star_f
    return (a * p + 1.0) ** (1.0 / p) / (ps * a + 1.0) ** (1.0 / ps)


def exponent_gap(params: SobolevParams) -> Fraction:
    """``1/p - 1/p*``, exactly; equals ``m/N``."""
    return 1 / params.p - 1 / params.p_star


def second_factor(alpha: Sequence[int], p: float) -> float:
    """``[sum_j a_j^p (p a_j + 1)/(p (a_j - 1) + 1)]^(-1/p)`` over active coordinates."""
    if not any(alpha):
        raise ValueError("second factor is undefined for the zero multi-index")
    s = sum(a**p * (p * a + 1.0) / (p * (a - 1) + 1.0) for a in alpha if a)
    return s ** (-1.0 / p)


def lp_norm(alpha: Sequence[int], p: float) -> float:
    """``(sum a_j^p)^(1/p)``; exact when only one entry is nonzero."""
    nz = [a for a in alpha if a]
    if not nz:
        return 0.0
    if len(nz) == 1:
        return float(nz[0])
    return sum(a**p for a in nz) ** (1.0 / p)


@dataclass(frozen=True)
class MeanChecks:
    amgm_ok: bool
    amgm_margin: float  # AM^N - GM^N of max(alpha_j, 1), computed exactly
    lq_ok: bool
    lq_margin: float  # ||alpha||_p - ||alpha||_1
    second_ok: bool
    second_margin: float  # 1/||alpha||_p - second_factor


def mean_inequality_checks(alpha: Sequence[int], p: float) -> MeanChecks:
    if not any(alpha):
        raise ValueError("checks need a nonzero multi-index")
    N = len(alpha)
    vals = [max(a, 1) for a in alpha]
    am_pow = Fraction(sum(vals), N) ** N
    gm_pow = math.prod(vals)
    amgm = am_pow - gm_pow
    l1 = float(sum(alpha))
    lp = lp_norm(alpha, p)
    sf = second_factor(alpha, p)
    return MeanChecks(
        amgm_ok=amgm >= 0,
        amgm_margin=float(amgm),
        lq_ok=l1 <= lp,
        lq_margin=lp - l1,
        second_ok=sf <= 1.0 / lp,
        second_margin=1.0 / lp - sf,
    )


@dataclass(frozen=True)
class ProofChainScan:
    params: SobolevParams
    box: int
    count: int
    amgm_violations: int
    lq_violations: int
    second_violations: int
    min_lq_margin: float
    min_second_margin: float

    @property
    def ok(self) -> bool:
        return not (self.amgm_violations or self.lq_violations or self.second_violations)


def proof_chain_scan(params: SobolevParams, box_limit: int) -> ProofChainScan:
    """Vectorised :func:`mean_inequality_checks` over ``{0..K}^N`` minus the origin.

    The AM-GM check is done in int64 as ``N^N prod v <= (sum v)^N``, exact
    while ``(N K)^N`` fits; single-support rows use the exact ``l^p`` value.
    """
    N, K, p = params.dim, int(box_limit), params.pf
    if (N * max(K, 1)) ** N >= 2**62:
        raise ValueError("box too large for the exact integer AM-GM check")
    grids = np.meshgrid(*([np.arange(K + 1)] * N), indexing="ij")
    A = np.stack([g.ravel() for g in grids], axis=1)[1:]  # drop the zero index
    V = np.maximum(A, 1).astype(np.int64)
    amgm_bad = N**N * np.prod(V, axis=1) > np.sum(V, axis=1) ** N
    Af = A.astype(float)
    nnz = np.count_nonzero(A, axis=1)
    l1 = Af.sum(axis=1)
    lp = np.where(nnz == 1, l1, np.sum(Af**p, axis=1) ** (1.0 / p))
    terms = np.where(A > 0, Af**p * (p * Af + 1.0) / (p * (Af - 1.0) + 1.0), 0.0)
    sf = terms.sum(axis=1) ** (-1.0 / p)
    lq_margin = lp - l1
    second_margin = 1.0 / lp - sf
    return ProofChainScan(
        params,
        K,
        int(A.shape[0]),
        int(amgm_bad.sum()),
        int((lq_margin < 0).sum()),
        int((second_margin < 0).sum()),
        float(lq_margin.min()),
        float(second_margin.min()),
    )


# -- polynomial verifiers --------------------------------------------------------


def poincare_sides(P: Polynomial, params: SobolevParams, tol: float = DEFAULT_TOL, method: str = "auto"):
    """``(||P+||_{p*} + ||P-||_{p*}, ||grad P+||_p + ||grad P-||_p)``."""
    d = decompose(P)
    ps = params.p_star_f
    lhs = lq_quasinorm(d.plus, ps, method, tol) + lq_quasinorm(-d.minus, ps, method, tol)
    rhs = gradient_triple_norm(P, params.pf, tol, method)
    return lhs, rhs


def verify_poincare(
    P: Polynomial,
    params: SobolevParams,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    exploratory: bool = False,
) -> RatioReport:
    """Both sides of ``|||P - P0|||_{p*} <= A |||grad P|||_p`` for one polynomial.

    A constant ``P`` gives a degenerate report (0/0) rather than an error.
    """
    if params.m != 1:
        raise ValueError("verify_poincare needs m = 1; use verify_higher")
    _require_window(params, "1.3", exploratory)
    lhs, rhs = poincare_sides(P, params, tol, method)
    return _report(params, P, lhs, rhs, "1.3", exploratory)


def verify_higher(
    P: Polynomial,
    params: SobolevParams,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    exploratory: bool = False,
) -> RatioReport:
    """Order-m version: ``|||P - P_{m-1}|||_{p*}`` against ``|||D^m P|||_p``."""
    _require_window(params, "1.4", exploratory)
    _, rest = truncate_degree(P, params.m)
    lhs = triple_stroke_norm(rest, params.p_star_f, tol, method)
    rhs = m_gradient_triple_norm(P, params.pf, params.m, tol, method)
    return _report(params, P, lhs, rhs, "1.4", exploratory)


def verify_embedding(
    P: Polynomial,
    params: SobolevParams,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    exploratory: bool = False,
) -> RatioReport:
    """``|||P|||_{p*}`` against ``|||P|||_p + |||grad P|||_p``.

    ``extras`` carries the two facts the reduction to the first-order
    inequality uses: the constant term has the same norm at both
    exponents, and ``|p0| <= |||P|||_p``.
    """
    if params.m != 1:
        raise ValueError("verify_embedding needs m = 1")
    _require_window(params, "1.6", exploratory)
    ps, p = params.p_star_f, params.pf
    lhs = triple_stroke_norm(P, ps, tol, method)
    norm_p = triple_stroke_norm(P, p, tol, method)
    rhs = norm_p + gradient_triple_norm(P, p, tol, method)
    const = Polynomial.constant(P.dim, P.constant_term)
    c_star = triple_stroke_norm(const, ps, tol, method)
    c_p = triple_stroke_norm(const, p, tol, method)
    return _report(
        params,
        P,
        lhs,
        rhs,
        "1.6",
        exploratory,
        constant_norm_equal=c_star == c_p,
        constant_bounded=abs(P.constant_term) <= norm_p,
    )


@dataclass(frozen=True)
class MediantCheck:
    ratio: float | None
    ratio_plus: float | None
    ratio_minus: float | None
    margin: float  # max(ratio_plus, ratio_minus) - ratio

    @property
    def ok(self) -> bool:
        return self.margin >= -1e-12


def mediant_reduction_check(
    P: Polynomial, params: SobolevParams, tol: float = DEFAULT_TOL, method: str = "auto"
) -> MediantCheck:
    """Compare the ratio of ``P`` with the ratios of its two sign parts."""
    d = decompose(P)
    full = verify_poincare(P, params, tol, method).ratio
    rp = verify_poincare(d.plus, params, tol, method).ratio if not d.plus.is_zero() else None
    rm = verify_poincare(d.minus, params, tol, method).ratio if not d.minus.is_zero() else None
    parts = [r for r in (rp, rm) if r is not None]
    if full is None or not parts:
        return MediantCheck(full, rp, rm, 0.0)
    return MediantCheck(full, rp, rm, max(parts) - full)
