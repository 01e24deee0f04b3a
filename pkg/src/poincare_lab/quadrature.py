"""Integrals of powers of sign-definite polynomials over (0, 1)^N.

Three independent routes:

* :func:`integrate_power` -- tensor-product Gauss-Legendre panels on a
  mesh graded geometrically toward every face ``x_j = 0``;
* :func:`integrate_power_mc` -- plain Monte Carlo with a seeded PCG64 stream;
* :func:`integrate_exact_integer` -- exact rational expansion of ``f**k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .poly import Polynomial, evaluate_points

DEFAULT_TOL = 1e-9
DEFAULT_RATIO = 0.5
DEFAULT_DEGREE = 12
MAX_LEVEL = 60
MAX_NODES = 60_000_000
_CHUNK_POINTS = 1 << 20

MC_GENERATOR = "numpy.PCG64"


class QuadratureError(RuntimeError):
    """Refinement did not converge inside the node / level budget."""


class SignError(ValueError):
    """Integrand polynomial has coefficients of both signs."""


class ExpansionBudgetError(RuntimeError):
    """Exact expansion of ``f**k`` would exceed the term budget."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_estimate: float
    method: str  # "graded-quadrature" | "monte-carlo" | "exact-rational"
    work: int
    provenance: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "err_estimate": self.err_estimate,
            "method": self.method,
            "work": self.work,
            "provenance": dict(self.provenance),
        }


def _definite(f: Polynomial) -> Polynomial:
    s = f.sign()
    if s == 0 and not f.is_zero():
        raise SignError(f"integrand is not sign-definite: {f.pretty()}")
    return -f if s < 0 else f


def _is_integer(q: float) -> bool:
    return float(q).is_integer()


@lru_cache(maxsize=None)
def _gauss(degree: int):
    return np.polynomial.legendre.leggauss(degree)


@lru_cache(maxsize=256)
def _graded_axis(lo: int, hi: int, ratio: float, degree: int):
    """Union of nodes of the graded rules at levels ``lo..hi``.

    Level ``L`` uses breakpoints ``0, r^L, r^(L-1), ..., r, 1``. All levels
    share the panels ``[r^k, r^(k-1)]`` and differ only in the innermost
    panel, so the union costs one extra panel per level. Returns the nodes
    and a ``(hi - lo + 1, n)`` weight matrix, one row per level.
    """
    t, w = _gauss(degree)
    panels = [(ratio**k, ratio ** (k - 1)) for k in range(hi, 0, -1)]
    inner = [(0.0, ratio**L) for L in range(lo, hi + 1)]
    nodes, weights, owner = [], [], []
    for i, (a, b) in enumerate(inner + panels):
        nodes.append(0.5 * (a + b) + 0.5 * (b - a) * t)
        weights.append(0.5 * (b - a) * w)
        owner.append(np.full(degree, i))
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    owner = np.concatenate(owner)
    n_inner = len(inner)
    W = np.zeros((n_inner, nodes.size))
    for row, L in enumerate(range(lo, hi + 1)):
        # shared panel index for [r^k, r^(k-1)] is n_inner + (hi - k)
        keep = (owner == row) | ((owner >= n_inner) & (owner >= n_inner + hi - L))
        W[row, keep] = weights[keep]
    nodes.setflags(write=False)
    W.setflags(write=False)
    return nodes, W


def _start_level(q: float) -> int:
    # integer powers give polynomial integrands: one panel is already exact
    return 0 if _is_integer(q) else 1


def _levels_monomial(alpha, coef, q, nodes, W):
    out = np.full(W.shape[0], abs(coef) ** q)
    for a in alpha:
        if a:
            out = out * (W @ nodes ** (q * a))
        else:
            out = out * W.sum(axis=1)
    return out, nodes.size * len(alpha)


def _levels_tensor(f: Polynomial, q: float, nodes, W):
    N = f.dim
    n = nodes.size
    maxexp = f.max_exponents()
    C = np.zeros(tuple(e + 1 for e in maxexp))
    for alpha, c in f.items():
        C[alpha] = c
    V = [nodes[:, None] ** np.arange(e + 1)[None, :] for e in maxexp]
    # contract the trailing axes once; they are shared by every chunk
    tail = C
    for j in range(1, N):
        # tensordot appends the new node axis last, so coordinate order is kept
        tail = np.tensordot(tail, V[j], axes=([1], [1]))
    tail = tail.reshape(maxexp[0] + 1, -1)
    rows = max(1, _CHUNK_POINTS // max(1, n ** (N - 1)))
    acc = np.zeros((W.shape[0], n ** (N - 1)))
    for start in range(0, n, rows):
        sl = slice(start, min(n, start + rows))
        vals = V[0][sl] @ tail
        np.maximum(vals, 0.0, out=vals)
        if q != 1.0:
            vals = vals**q
        acc += W[:, sl] @ vals
    out = acc
    for _ in range(1, N):
        out = out.reshape(W.shape[0], n, -1)
        out = np.einsum("lj,ljr->lr", W, out)
    return out.reshape(W.shape[0]), n**N


def integrate_power(
    f: Polynomial,
    q: float,
    tol: float = DEFAULT_TOL,
    *,
    ratio: float = DEFAULT_RATIO,
    degree: int = DEFAULT_DEGREE,
    max_nodes: int = MAX_NODES,
) -> QuadResult:
    """Integrate ``|f|**q`` over the unit cube by graded Gauss-Legendre quadrature.

    Parameters
    ----------
    f : Polynomial
        Sign-definite integrand (all coefficients of one sign).
    q : float
        Exponent, ``q > 0``.
    tol : float
        Relative agreement required between two successive refinement
        levels. The returned ``err_estimate`` is the last such difference.
    ratio, degree : float, int
        Geometric grading factor and Gauss points per panel per axis.
    max_nodes : int
        Budget on tensor-grid size; exceeding it raises QuadratureError.

    Notes
    -----
    For a single monomial the tensor rule factorises exactly into a
    product of one-dimensional rules, which is what is evaluated.
    """
    if q <= 0:
        raise ValueError(f"exponent q must be positive, got {q}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = _definite(f)
    if g.is_zero():
        return QuadResult(0.0, 0.0, "graded-quadrature", 0, {"levels": []})
    q = float(q)
    # each pass evaluates levels lo, lo+1, lo+2 on one union grid; the next
    # pass starts at lo+2 so every consecutive pair is compared exactly once
    lo = _start_level(q)
    work = 0
    while True:
        hi = lo + 2
        nodes, W = _graded_axis(lo, hi, ratio, degree)
        if g.is_monomial():
            (alpha, c), = g.items()
            levels, w = _levels_monomial(alpha, c, q, nodes, W)
        else:
            if nodes.size ** g.dim > max_nodes:
                raise QuadratureError(
                    f"node budget {max_nodes} exceeded at level {hi} "
                    f"({nodes.size}^{g.dim} nodes) for q={q}; last estimates did not agree to tol={tol}"
                )
            levels, w = _levels_tensor(g, q, nodes, W)
        work += w
        diffs = np.abs(np.diff(levels))
        for i, d in enumerate(diffs):
            if d <= tol * abs(levels[i + 1]):
                return QuadResult(
                    float(levels[i + 1]),
                    float(d),
                    "graded-quadrature",
                    work,
                    {"level": lo + i + 1, "ratio": ratio, "degree": degree},
                )
        if hi >= MAX_LEVEL:
            raise QuadratureError(f"no convergence by level {MAX_LEVEL} for q={q}")
        lo = hi


def integrate_power_mc(f: Polynomial, q: float, n: int, seed: int, *, chunk: int = 1 << 16) -> QuadResult:
    """Monte Carlo estimate of ``int |f|**q`` from ``n`` uniform points.

    Points come from ``numpy.random.Generator(PCG64(seed))`` in fixed-size
    chunks, so the result is bit-identical for fixed ``(seed, n)``.
    ``err_estimate`` is one standard error.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    g = _definite(f)
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = np.empty(n)
    for start in range(0, n, chunk):
        k = min(chunk, n - start)
        X = rng.random((k, g.dim))
        v = evaluate_points(g, X) if not g.is_zero() else np.zeros(k)
        np.maximum(v, 0.0, out=v)
        vals[start:start + k] = v**q
    mean = float(vals.mean())
    err = float(vals.std(ddof=1) / math.sqrt(n))
    return QuadResult(mean, err, "monte-carlo", n, {"generator": MC_GENERATOR, "seed": seed, "n": n})


def integrate_monomials_exact(terms: dict) -> Fraction:
    """``sum c_alpha prod 1/(alpha_j + 1)`` over a dict of exact coefficients."""
    total = Fraction(0)
    for alpha, c in terms.items():
        den = 1
        for a in alpha:
            den *= a + 1
        total += Fraction(c) / den
    return total


def expand_power_exact(f: Polynomial, k: int, max_terms: int = 2_000_000) -> dict:
    if k < 0:
        raise ValueError("power must be non-negative")
    base = f.to_fractions()
    out = {(0,) * f.dim: Fraction(1)}
    for _ in range(k):
        if len(out) * max(1, len(base)) > max_terms:
            raise ExpansionBudgetError(
                f"expanding f^{k} needs more than {max_terms} term products"
            )
        nxt: dict = {}
        for a, c in out.items():
            for b, d in base.items():
                key = tuple(i + j for i, j in zip(a, b))
                nxt[key] = nxt.get(key, 0) + c * d
        out = {a: c for a, c in nxt.items() if c != 0}
    return out


def integrate_exact_integer(f: Polynomial, k: int, max_terms: int = 2_000_000) -> Fraction:
    """Exact value of ``int f**k`` over the unit cube, ``k`` in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise ValueError(f"exact oracle supports k in {{1, 2, 3}}, got {k}")
    return integrate_monomials_exact(expand_power_exact(f, k, max_terms))
