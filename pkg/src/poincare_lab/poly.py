"""Sparse multivariate polynomials on the unit cube (0, 1)^N.

A polynomial is an immutable map from multi-indices (tuples of
non-negative ints) to nonzero float coefficients, with the ambient
dimension stored explicitly so that the zero polynomial still knows it.
Terms iterate in graded-lexicographic order: total degree first, then
lexicographically with ``x_1 > x_2 > ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

MultiIndex = tuple[int, ...]


class PolynomialError(ValueError):
    """Malformed polynomial data (bad multi-index, duplicate term, ...)."""


def degree(alpha: Sequence[int]) -> int:
    return sum(alpha)


def support(alpha: Sequence[int]) -> tuple[int, ...]:
    """Coordinates where ``alpha`` has a positive entry."""
    return tuple(j for j, a in enumerate(alpha) if a)


def grlex_key(alpha: Sequence[int]):
    return (sum(alpha), tuple(-a for a in alpha))


def check_multi_index(alpha, dim: int) -> MultiIndex:
    try:
        alpha = tuple(alpha)
    except TypeError:
        raise PolynomialError(f"multi-index must be a sequence, got {alpha!r}") from None
    if len(alpha) != dim:
        raise PolynomialError(f"multi-index {alpha} has length {len(alpha)}, expected {dim}")
    for a in alpha:
        if isinstance(a, bool) or not isinstance(a, int) or a < 0:
            raise PolynomialError(f"multi-index {alpha} must hold non-negative integers")
    return alpha


def multi_indices(dim: int, order: int) -> list[MultiIndex]:
    """All multi-indices of total degree exactly ``order``, in grlex order."""
    out = []
    for combo in combinations_with_replacement(range(dim), order):
        alpha = [0] * dim
        for j in combo:
            alpha[j] += 1
        out.append(tuple(alpha))
    out.sort(key=grlex_key)
    return out


def multi_indices_upto(dim: int, max_degree: int, min_degree: int = 0) -> list[MultiIndex]:
    out = []
    for d in range(min_degree, max_degree + 1):
        out.extend(multi_indices(dim, d))
    return out


class Polynomial:
    """Immutable sparse polynomial with real coefficients.

    Parameters
    ----------
    dim : int
        Ambient dimension N >= 1.
    terms : mapping, optional
        ``{alpha: coef}``. Zero coefficients are dropped.

    Examples
    --------
    >>> x, y = variables(2)
    >>> p = 3 - 2 * x + x * y
    >>> p.coefficient((1, 0))
    -2.0
    """

    __slots__ = ("_dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], float] | None = None):
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise PolynomialError(f"dimension must be a positive integer, got {dim!r}")
        items = []
        for alpha, c in (terms or {}).items():
            alpha = check_multi_index(alpha, dim)
            c = float(c)
            if not math.isfinite(c):
                raise PolynomialError(f"coefficient of {alpha} is not finite: {c}")
            if c != 0.0:
                items.append((alpha, c))
        items.sort(key=lambda t: grlex_key(t[0]))
        self._dim = dim
        self._terms = tuple(items)
        self._hash = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_terms(cls, dim: int, pairs: Iterable[tuple[Sequence[int], float]]) -> "Polynomial":
        """Build from ``(alpha, coef)`` pairs, rejecting duplicate multi-indices."""
        seen: dict[MultiIndex, float] = {}
        for alpha, c in pairs:
            alpha = check_multi_index(alpha, dim)
            if alpha in seen:
                raise PolynomialError(f"duplicate multi-index {list(alpha)}")
            seen[alpha] = c
        return cls(dim, seen)

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c: float) -> "Polynomial":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], coef: float = 1.0) -> "Polynomial":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: coef})

    # -- basic accessors --------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[MultiIndex, float]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[MultiIndex, float]]:
        return iter(self._terms)

    def coefficient(self, alpha: Sequence[int]) -> float:
        alpha = tuple(alpha)
        for a, c in self._terms:
            if a == alpha:
                return c
        return 0.0

    @property
    def constant_term(self) -> float:
        return self.coefficient((0,) * self._dim)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a, _ in self._terms), default=-1)

    def max_exponents(self) -> tuple[int, ...]:
        return tuple(max((a[j] for a, _ in self._terms), default=0) for j in range(self._dim))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def sign(self) -> int:
        """+1 / -1 if all coefficients share that sign, 0 if zero or mixed."""
        signs = {c > 0 for _, c in self._terms}
        if signs == {True}:
            return 1
        if signs == {False}:
            return -1
        return 0

    def to_fractions(self) -> dict[MultiIndex, Fraction]:
        """Exact rational copy of the (binary) coefficients."""
        return {a: Fraction(c) for a, c in self._terms}

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other._dim != self._dim:
                raise PolynomialError(f"dimension mismatch: {self._dim} vs {other._dim}")
            return other
        if isinstance(other, (int, float, Fraction)):
            return Polynomial.constant(self._dim, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for a, c in other._terms:
            acc[a] = acc.get(a, 0.0) + c
        return Polynomial(self._dim, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self._dim, {a: -c for a, c in self._terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: float) -> "Polynomial":
        return Polynomial(self._dim, {a: c * v for a, v in self._terms})

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            return self.scale(float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[MultiIndex, float] = {}
        for a, c in self._terms:
            for b, d in other._terms:
                k = tuple(i + j for i, j in zip(a, b))
                acc[k] = acc.get(k, 0.0) + c * d
        return Polynomial(self._dim, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("only non-negative integer powers are supported")
        out = Polynomial.constant(self._dim, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dim, self._terms))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return f"Polynomial({self._dim}, 0)"
        return f"Polynomial({self._dim}, {self.pretty()})"

    def pretty(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = ("x", "y", "z", "w") if self._dim <= 4 else [f"x{j + 1}" for j in range(self._dim)]
        if not self._terms:
            return "0"
        parts = []
        for alpha, c in self._terms:
            mono = "*".join(
                names[j] if a == 1 else f"{names[j]}^{a}" for j, a in enumerate(alpha) if a
            )
            if not mono:
                parts.append(repr(c))
            elif c == 1.0:
                parts.append(mono)
            elif c == -1.0:
                parts.append("-" + mono)
            else:
                parts.append(f"{c!r}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self._dim,
            "terms": [{"alpha": list(a), "coef": c} for a, c in self._terms],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Polynomial":
        """Parse the ``{"dim": N, "terms": [{"alpha": [...], "coef": c}, ...]}`` form.

        Terms may come in any order; duplicates, zero coefficients and
        wrong-length multi-indices are rejected with the term position.
        """
        if not isinstance(data, Mapping):
            raise PolynomialError("polynomial JSON must be an object")
        if "schema_version" in data:
            major = str(data["schema_version"]).split(".")[0]
            if major != "1":
                raise PolynomialError(f"unsupported schema_version {data['schema_version']!r}")
        if "dim" not in data or "terms" not in data:
            raise PolynomialError("polynomial JSON needs 'dim' and 'terms'")
        dim = data["dim"]
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise PolynomialError(f"'dim' must be a positive integer, got {dim!r}")
        terms = data["terms"]
        if not isinstance(terms, list):
            raise PolynomialError("'terms' must be a list")
        seen: dict[MultiIndex, tuple[int, float]] = {}
        for pos, term in enumerate(terms):
            if not isinstance(term, Mapping) or "alpha" not in term or "coef" not in term:
                raise PolynomialError(f"term #{pos}: expected an object with 'alpha' and 'coef'")
            try:
                alpha = check_multi_index(term["alpha"], dim)
            except PolynomialError as exc:
                raise PolynomialError(f"term #{pos}: {exc}") from None
            coef = term["coef"]
            if isinstance(coef, bool) or not isinstance(coef, (int, float)):
                raise PolynomialError(f"term #{pos}: coefficient must be a number")
            if coef == 0:
                raise PolynomialError(f"term #{pos}: zero coefficient for alpha {list(alpha)}")
            if not math.isfinite(coef):
                raise PolynomialError(f"term #{pos}: non-finite coefficient")
            if alpha in seen:
                raise PolynomialError(
                    f"term #{pos}: duplicate alpha {list(alpha)} (first seen at term #{seen[alpha][0]})"
                )
            seen[alpha] = (pos, float(coef))
        return cls(dim, {a: c for a, (_, c) in seen.items()})


def variables(dim: int) -> tuple[Polynomial, ...]:
    """The coordinate functions ``x_1, ..., x_N`` as polynomials."""
    out = []
    for j in range(dim):
        alpha = [0] * dim
        alpha[j] = 1
        out.append(Polynomial(dim, {tuple(alpha): 1.0}))
    return tuple(out)


@dataclass(frozen=True)
class Decomposition:
    """Constant term plus positive and negative non-constant parts."""

    p0: float
    plus: Polynomial
    minus: Polynomial

    def recompose(self) -> Polynomial:
        return Polynomial.constant(self.plus.dim, self.p0) + self.plus + self.minus


def decompose(P: Polynomial) -> Decomposition:
    """Split ``P`` by degree and coefficient sign.

    The degree-0 term goes to ``p0``; all other terms go to ``plus`` or
    ``minus`` according to the sign of their coefficient.
    """
    zero = (0,) * P.dim
    plus, minus = {}, {}
    p0 = 0.0
    for alpha, c in P.items():
        if alpha == zero:
            p0 = c
        elif c > 0:
            plus[alpha] = c
        else:
            minus[alpha] = c
    return Decomposition(p0, Polynomial(P.dim, plus), Polynomial(P.dim, minus))


def differentiate(P: Polynomial, j: int) -> Polynomial:
    """Partial derivative with respect to coordinate ``j`` (0-based)."""
    if not 0 <= j < P.dim:
        raise IndexError(f"coordinate index {j} out of range for dimension {P.dim}")
    out = {}
    for alpha, c in P.items():
        if alpha[j]:
            beta = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            out[beta] = c * alpha[j]
    return Polynomial(P.dim, out)


def gradient(P: Polynomial) -> list[Polynomial]:
    return [differentiate(P, j) for j in range(P.dim)]


def _falling(a: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= a - i
    return out


def partial(P: Polynomial, beta: Sequence[int]) -> Polynomial:
    """Mixed partial derivative ``D^beta P``."""
    beta = check_multi_index(beta, P.dim)
    out = {}
    for alpha, c in P.items():
        if all(a >= b for a, b in zip(alpha, beta)):
            factor = math.prod(_falling(a, b) for a, b in zip(alpha, beta))
            out[tuple(a - b for a, b in zip(alpha, beta))] = c * factor
    return Polynomial(P.dim, out)


def higher_gradient(P: Polynomial, m: int) -> dict[MultiIndex, Polynomial]:
    """Every ``D^beta P`` with ``|beta| = m``, zero entries included, in grlex order.

    Each unordered multi-index appears once, without multinomial weights.
    """
    if m < 1:
        raise ValueError("derivative order must be >= 1")
    return {beta: partial(P, beta) for beta in multi_indices(P.dim, m)}


def truncate_degree(P: Polynomial, m: int) -> tuple[Polynomial, Polynomial]:
    """Split ``P`` into (terms of degree <= m-1, terms of degree >= m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    low = {a: c for a, c in P.items() if sum(a) <= m - 1}
    rest = {a: c for a, c in P.items() if sum(a) >= m}
    return Polynomial(P.dim, low), Polynomial(P.dim, rest)


def evaluate(P: Polynomial, x: Sequence[float]) -> float:
    if len(x) != P.dim:
        raise PolynomialError(f"point has length {len(x)}, polynomial dimension is {P.dim}")
    maxexp = P.max_exponents()
    powers = []
    for xj, k in zip(x, maxexp):
        row = [1.0]
        for _ in range(k):
            row.append(row[-1] * xj)
        powers.append(row)
    total = 0.0
    for alpha, c in P.items():
        t = c
        for j, a in enumerate(alpha):
            if a:
                t *= powers[j][a]
        total += t
    return total


def evaluate_points(P: Polynomial, X):
    """Vectorised evaluation at the rows of an ``(n, N)`` array."""
    import numpy as np

    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != P.dim:
        raise PolynomialError(f"expected points of shape (n, {P.dim}), got {X.shape}")
    maxexp = P.max_exponents()
    powers = []
    for j, k in enumerate(maxexp):
        cols = [np.ones(X.shape[0])]
        for _ in range(k):
            cols.append(cols[-1] * X[:, j])
        powers.append(cols)
    total = np.zeros(X.shape[0])
    for alpha, c in P.items():
        t = np.full(X.shape[0], c)
        for j, a in enumerate(alpha):
            if a:
                t = t * powers[j][a]
        total += t
    return total
