"""Random polynomial sampling and empirical search for the constant A(N, p).

Sampler streams are derived from ``(master seed, index)`` through
:class:`numpy.random.SeedSequence`, so any sample can be regenerated
alone and parallel runs see the same polynomials as sequential ones.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .exponents import SobolevParams
from .lab import RatioReport, verify_higher, verify_poincare
from .poly import Polynomial, multi_indices_upto
from .quadrature import DEFAULT_TOL

COEF_DISTS = ("uniform", "log-uniform")
SIGN_MODES = ("mixed", "positive")


def derive_seed(master: int, *keys: int) -> int:
    """Independent 64-bit seed for the stream ``(master, *keys)``."""
    ss = np.random.SeedSequence([int(master), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SamplerConfig:
    dim: int
    max_degree: int = 8
    support_size: int = 4
    coef_dist: str = "uniform"
    sign_mode: str = "mixed"
    seed: int = 0
    include_constant: bool = True

    def __post_init__(self):
        if self.support_size < 1:
            raise ValueError("support_size must be >= 1")
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if self.coef_dist not in COEF_DISTS:
            raise ValueError(f"coef_dist must be one of {COEF_DISTS}")
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")


def sample_polynomial(cfg: SamplerConfig) -> Polynomial:
    """Draw one polynomial; identical output for identical ``cfg``.

    Support is a uniform draw without replacement from the multi-indices
    of degree in ``[0 or 1, max_degree]``. Magnitudes lie in (0, 1]
    (uniform or log-uniform over three decades). Signs are always drawn so
    that the positive-only stream is the absolute value of the mixed one.
    """
    rng = np.random.default_rng(cfg.seed)
    pool = multi_indices_upto(cfg.dim, cfg.max_degree, 0 if cfg.include_constant else 1)
    k = min(cfg.support_size, len(pool))
    picks = rng.choice(len(pool), size=k, replace=False)
    u = rng.random(k)
    if cfg.coef_dist == "uniform":
        mags = 1.0 - u
    else:
        mags = 10.0 ** (-3.0 * u)
    signs = np.where(rng.random(k) < 0.5, -1.0, 1.0)
    if cfg.sign_mode == "positive":
        signs = np.ones(k)
    return Polynomial(cfg.dim, {pool[i]: float(s * m) for i, s, m in zip(picks, signs, mags)})


def random_suite(cfg: SamplerConfig, count: int, start: int = 0):
    """Yield ``(index, seed, polynomial)`` for indices ``start .. start+count-1``."""
    for i in range(start, start + count):
        seed = derive_seed(cfg.seed, i)
        yield i, seed, sample_polynomial(replace(cfg, seed=seed))


@dataclass(frozen=True)
class SearchConfig:
    degree: int = 8
    support: int = 4
    random_budget: int = 200
    climb_budget: int = 200
    sigma0: float = 1.0
    patience: int = 50
    sigma_min: float = 1e-4
    seed: int = 0
    sign_mode: str = "positive"
    coef_dist: str = "uniform"
    seed_monomials: bool = True
    tol: float = DEFAULT_TOL
    exploratory: bool = False

    def sampler(self, dim: int) -> SamplerConfig:
        return SamplerConfig(dim, self.degree, self.support, self.coef_dist, self.sign_mode, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ConstantEstimate:
    params: SobolevParams
    value: float
    witness: Polynomial
    budget_used: int
    search_trace: list = field(default_factory=list)  # (evaluation index, best so far)
    config: SearchConfig | None = None

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "value": self.value,
            "witness": self.witness.to_dict(),
            "budget_used": self.budget_used,
            "search_trace": [[i, v] for i, v in self.search_trace],
            "config": self.config.to_dict() if self.config else None,
        }


class _Tracker:
    def __init__(self, params, tol, exploratory):
        self.params, self.tol, self.exploratory = params, tol, exploratory
        self.evals = 0
        self.best: float = -math.inf
        self.witness: Polynomial | None = None
        self.trace: list[tuple[int, float]] = []

    def score(self, P: Polynomial) -> float | None:
        self.evals += 1
        verify = verify_poincare if self.params.m == 1 else verify_higher
        rep: RatioReport = verify(P, self.params, self.tol, exploratory=self.exploratory)
        if rep.ratio is None:
            return None
        if rep.ratio > self.best:
            self.best, self.witness = rep.ratio, P
            self.trace.append((self.evals, rep.ratio))
        return rep.ratio


def estimate_constant(params: SobolevParams, search: SearchConfig = SearchConfig()) -> ConstantEstimate:
    """Empirical lower estimate of the best constant for the Poincare ratio.

    For ``params.m > 1`` the order-m ratio of :func:`verify_higher` is
    maximised instead. Phase 0 (optional) scores every monomial of degree
    ``m..degree``;
    phase 1 scores ``random_budget`` sampled polynomials; phase 2 climbs
    from the best witness with multiplicative coefficient moves
    ``c_i * exp(+-sigma)``, halving ``sigma`` after ``patience`` straight
    failures and stopping below ``sigma_min`` or when ``climb_budget``
    evaluations are spent.
    """
    if search.random_budget <= 0:
        raise ValueError("random_budget must be positive")
    if search.climb_budget < 0:
        raise ValueError("climb_budget must be non-negative")
    tr = _Tracker(params, search.tol, search.exploratory)

    if search.seed_monomials:
        for alpha in multi_indices_upto(params.dim, search.degree, params.m):
            tr.score(Polynomial.monomial(alpha))

    for _, _, P in random_suite(search.sampler(params.dim), search.random_budget):
        tr.score(P)

    if tr.witness is not None and search.climb_budget > 0:
        rng = np.random.default_rng(derive_seed(search.seed, 1 << 30))
        alphas = [a for a, _ in tr.witness.items()]
        coefs = np.array([c for _, c in tr.witness.items()])
        current = tr.best
        sigma, fails, spent = search.sigma0, 0, 0
        while spent < search.climb_budget and sigma >= search.sigma_min:
            steps = np.where(rng.random(coefs.size) < 0.5, -sigma, sigma)
            trial = coefs * np.exp(steps)
            cand = Polynomial(params.dim, dict(zip(alphas, trial.tolist())))
            spent += 1
            r = tr.score(cand)
            if r is not None and r > current:
                coefs, current, fails = trial, r, 0
            else:
                fails += 1
                if fails >= search.patience:
                    sigma, fails = sigma / 2.0, 0

    if tr.witness is None:
        raise RuntimeError("every sampled polynomial was degenerate")
    if not tr.trace or tr.trace[-1][0] != tr.evals:
        tr.trace.append((tr.evals, tr.best))
    return ConstantEstimate(params, tr.best, tr.witness, tr.evals, tr.trace, search)


@dataclass
class SweepCell:
    index: int
    params: SobolevParams
    seed: int
    estimate: ConstantEstimate | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "params": self.params.to_dict(),
            "seed": self.seed,
            "estimate": self.estimate.to_dict() if self.estimate else None,
            "error": self.error,
        }


def cell_search(search: SearchConfig, index: int) -> SearchConfig:
    """Search config used for sweep cell ``index``: same settings, derived seed."""
    return replace(search, seed=derive_seed(search.seed, index))


def _run_cell(args) -> SweepCell:
    index, params, search = args
    cfg = cell_search(search, index)
    try:
        est = estimate_constant(params, cfg)
        return SweepCell(index, params, cfg.seed, est)
    except Exception as exc:  # recorded in-band, the sweep keeps going
        return SweepCell(index, params, cfg.seed, None, f"{type(exc).__name__}: {exc}")


def sweep(grid, search: SearchConfig = SearchConfig(), workers: int = 1, skip=()) -> list[SweepCell]:
    """Run :func:`estimate_constant` on every cell, results in grid order.

    ``skip`` holds cell indices that are left out (used for resuming).
    """
    jobs = [(i, params, search) for i, params in enumerate(grid) if i not in set(skip)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs))
    return [_run_cell(j) for j in jobs]
