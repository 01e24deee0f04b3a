"""Sobolev exponent arithmetic and hypothesis-window checks.

Exponents are held as :class:`fractions.Fraction` so that boundary
identities such as ``p = N/(N+1) -> p* = 1`` hold exactly. Floats are
accepted and rationalised when a short fraction reproduces them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

# Windows differ per theorem: 1.3/1.6 need m = 1 and p < 1, 1.4 allows p = 1.
THEOREMS = ("1.3", "1.4", "1.6")


class ExponentError(ValueError):
    """Exponent triple outside the Sobolev regime (N - m p <= 0, p <= 0, ...)."""


def as_fraction(p) -> Fraction:
    """Rationalise an exponent given as Fraction, int, float or string like ``"2/3"``."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, Rational):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p.strip())
    p = float(p)
    short = Fraction(p).limit_denominator(10**6)
    if float(short) == p:
        return short
    return Fraction(p)


def sobolev_exponent(N: int, p, m: int = 1):
    """Return ``N p / (N - m p)``.

    Exact (a Fraction) when ``p`` is rational-typed, a float otherwise.
    Raises :class:`ExponentError` when the denominator is not positive.
    """
    if N < 1 or m < 1:
        raise ExponentError(f"need N >= 1 and m >= 1, got N={N}, m={m}")
    if p <= 0:
        raise ExponentError(f"exponent p must be positive, got {p}")
    denom = N - m * p
    if denom <= 0:
        raise ExponentError(f"N - m*p = {denom} <= 0: no Sobolev exponent (p >= N/m)")
    return N * p / denom


@dataclass(frozen=True)
class WindowReport:
    p_lower_ok: bool  # p >= N/(N+1)
    p_upper_ok: bool  # p < 1 (m = 1) or p <= 1 (order-m statement)
    p_star_ok: bool  # p* >= 1
    denominator_ok: bool  # N - m p > 0
    alt_exponent: float | None  # N/(N - p), the competing first-order exponent, for comparison

    @property
    def ok(self) -> bool:
        return self.p_lower_ok and self.p_upper_ok and self.p_star_ok and self.denominator_ok

    def explain(self) -> str:
        if self.ok:
            return "inside hypothesis window"
        bad = []
        if not self.denominator_ok:
            bad.append("N - m*p must be positive")
        if not self.p_lower_ok:
            bad.append("p must be >= N/(N+1)")
        if not self.p_upper_ok:
            bad.append("p must be < 1 (<= 1 for order m)")
        if not self.p_star_ok:
            bad.append("p* must be >= 1")
        return "; ".join(bad)


def window_check(N: int, p, m: int = 1, theorem: str = "1.3") -> WindowReport:
    """Report whether ``(N, p, m)`` satisfies the stated hypotheses.

    For ``theorem`` "1.3" and "1.6" the window is ``N/(N+1) <= p < 1`` with
    ``m = 1``; for "1.4" it is ``N/(N+1) <= p <= 1`` together with
    ``N - m p > 0``.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem selector {theorem!r}")
    pf = as_fraction(p)
    denom_ok = N - m * pf > 0 and pf > 0
    lower = pf >= Fraction(N, N + 1)
    if theorem == "1.4":
        upper = pf <= 1
    else:
        upper = pf < 1 and m == 1
    star_ok = denom_ok and sobolev_exponent(N, pf, m) >= 1
    alt = None
    if m == 1 and N - pf > 0:
        alt = float(Fraction(N) / (N - pf))
    return WindowReport(lower, upper, star_ok, denom_ok, alt)


@dataclass(frozen=True)
class SobolevParams:
    """Dimension, exponent and derivative order with the derived ``p*``."""

    dim: int
    p: Fraction
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise ExponentError(f"dimension must be a positive integer, got {self.dim!r}")
        if self.m < 1:
            raise ExponentError(f"order m must be >= 1, got {self.m}")
        sobolev_exponent(self.dim, self.p, self.m)  # validates

    @classmethod
    def boundary(cls, dim: int, m: int = 1) -> "SobolevParams":
        return cls(dim, Fraction(dim, dim + 1), m)

    @property
    def p_star(self) -> Fraction:
        return sobolev_exponent(self.dim, self.p, self.m)

    @property
    def pf(self) -> float:
        return float(self.p)

    @property
    def p_star_f(self) -> float:
        return float(self.p_star)

    def window(self, theorem: str = "1.3") -> WindowReport:
        return window_check(self.dim, self.p, self.m, theorem)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "p": _frac_str(self.p),
            "p_float": float(self.p),
            "m": self.m,
            "p_star": _frac_str(self.p_star),
            "p_star_float": float(self.p_star),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SobolevParams":
        return cls(int(d["dim"]), as_fraction(d["p"]), int(d.get("m", 1)))


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"
