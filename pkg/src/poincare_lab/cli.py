"""Command-line driver: ``poincare-lab <command> [options]``.

Exit codes: 0 success, 2 input/parse error, 3 parameters outside the
hypothesis window, 4 numerical non-convergence, 5 partial sweep failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exponents import ExponentError, SobolevParams, as_fraction, window_check
from .lab import (
    WindowError,
    monomial_ratio_sup,
    verify_embedding,
    verify_higher,
    verify_poincare,
)
from .norms import power_integral
from .poly import Polynomial, PolynomialError, decompose
from .quadrature import (
    DEFAULT_TOL,
    ExpansionBudgetError,
    QuadratureError,
    SignError,
    integrate_exact_integer,
    integrate_power,
    integrate_power_mc,
)
from .records import (
    SchemaError,
    dumps_line,
    dumps_pretty,
    frac_str,
    read_jsonl,
    run_record,
)
from .search import SamplerConfig, SearchConfig, derive_seed, estimate_constant, random_suite, sweep

EXIT_OK, EXIT_INPUT, EXIT_WINDOW, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4, 5
VERIFIERS = {"1.3": verify_poincare, "1.4": verify_higher, "1.6": verify_embedding}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    raw = os.environ.get("POINCARE_LAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"POINCARE_LAB_SEED must be an integer, got {raw!r}", EXIT_INPUT) from None


def _load_poly(path) -> Polynomial:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"{path}: no such file", EXIT_INPUT) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", EXIT_INPUT) from None
    try:
        return Polynomial.from_dict(data)
    except PolynomialError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(dim, p, m=1, theorem="1.3") -> SobolevParams:
    if theorem in ("1.3", "1.6") and m != 1:
        raise CliError(f"theorem {theorem} is first order; got m={m}", EXIT_WINDOW)
    try:
        params = SobolevParams(dim, as_fraction(p), m)
    except (ExponentError, ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid exponent parameters: {exc}", EXIT_WINDOW) from None
    w = params.window(theorem)
    if not w.ok:
        raise CliError(
            f"(N={dim}, p={params.p}, m={m}) is outside the window of theorem {theorem}: {w.explain()}",
            EXIT_WINDOW,
        )
    return params


# -- commands ------------------------------------------------------------------


def cmd_decompose(args) -> int:
    P = _load_poly(args.file)
    d = decompose(P)
    payload = {
        "schema_version": "1.0",
        "p0": Polynomial.constant(P.dim, d.p0).to_dict(),
        "plus": d.plus.to_dict(),
        "minus": d.minus.to_dict(),
    }
    _emit(dumps_pretty(payload), args.out)
    return EXIT_OK


def _part_norm(f: Polynomial, q: float, method: str, tol: float, seed: int, samples: int) -> dict:
    g = f if f.sign() >= 0 else -f
    if g.is_zero():
        return {"integral": 0.0, "norm": 0.0, "method": "zero", "err_estimate": 0.0}
    if method == "exact":
        if q not in (1.0, 2.0, 3.0):
            raise CliError("--method exact needs q in {1, 2, 3}", EXIT_INPUT)
        exact = integrate_exact_integer(g, int(q))
        val = float(exact)
        return {
            "integral": val,
            "integral_exact": frac_str(exact),
            "norm": val ** (1.0 / q),
            "method": "exact-rational",
            "err_estimate": 0.0,
        }
    if method == "mc":
        r = integrate_power_mc(g, q, samples, seed)
    elif method == "quad":
        r = integrate_power(g, q, tol)
    else:
        val = power_integral(g, q, "auto", tol)
        return {"integral": val, "norm": val ** (1.0 / q), "method": "auto", "err_estimate": None}
    out = r.to_dict()
    out["integral"] = out.pop("value")
    out["norm"] = r.value ** (1.0 / q)
    return out


def cmd_norm(args) -> int:
    P = _load_poly(args.file)
    q = float(as_fraction(args.q))
    if q <= 0:
        raise CliError("q must be positive", EXIT_INPUT)
    d = decompose(P)
    plus = _part_norm(d.plus, q, args.method, args.tol, derive_seed(args.seed, 1), args.samples)
    minus = _part_norm(d.minus, q, args.method, args.tol, derive_seed(args.seed, 2), args.samples)
    value = abs(d.p0) + plus["norm"] + minus["norm"]
    payload = {"schema_version": "1.0", "q": q, "value": value, "p0": abs(d.p0), "plus": plus, "minus": minus}
    if args.method == "exact" and q == 1.0:
        exact = abs(Fraction(d.p0)) + Fraction(plus.get("integral_exact", "0")) + Fraction(minus.get("integral_exact", "0"))
        payload["value_exact"] = frac_str(exact)
    params = {"file": str(args.file), "q": q, "method": args.method, "tol": args.tol, "seed": args.seed, "samples": args.samples}
    _emit(dumps_pretty(run_record("norm", params, [payload])), args.out)
    return EXIT_OK


def cmd_monomial_table(args) -> int:
    params = _params(args.dim, args.p, 1, "1.3")
    scan = monomial_ratio_sup(params, args.K)
    target = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(target, lineterminator="\n")
        w.writerow(["alpha", "lp_star_norm", "grad_lp_norm", "ratio"])
        for alpha, lhs, grad, ratio in scan.rows():
            w.writerow([" ".join(map(str, alpha)), repr(lhs), repr(grad), repr(ratio)])
        w.writerow(["sup:" + " ".join(map(str, scan.argmax)), "", "", repr(scan.sup)])
    finally:
        if args.out:
            target.close()
    return EXIT_OK


def _oracle_check(P, params, tol, seed, n):
    """Quadrature/exact vs Monte Carlo on one sign part of the LHS integrand."""
    d = decompose(P)
    f = d.plus if not d.plus.is_zero() else -d.minus
    if f.is_zero():
        return None
    q = params.p_star_f
    ref = power_integral(f, q, "auto", tol)
    mc = integrate_power_mc(f, q, n, seed)
    if mc.err_estimate == 0.0:
        # zero sample variance: any mismatch is reported as a huge finite z
        return 0.0 if mc.value == ref else abs(ref - mc.value) / 1e-300
    return abs(ref - mc.value) / mc.err_estimate


def cmd_verify(args) -> int:
    params = _params(args.dim, args.p, args.m, args.theorem)
    verifier = VERIFIERS[args.theorem]
    cfg = SamplerConfig(args.dim, args.degree, args.support, args.coef_dist, args.sign_mode, args.seed)
    if args.poly:
        items = [(0, None, _load_poly(args.poly))]
        if items[0][2].dim != args.dim:
            raise CliError(f"polynomial dimension {items[0][2].dim} != --dim {args.dim}", EXIT_INPUT)
    else:
        items = random_suite(cfg, args.samples)
    out = open(args.out, "w") if args.out else sys.stdout
    count = degenerate = 0
    max_ratio, max_id = None, None
    zs = []
    try:
        try:
            for index, seed, P in items:
                rep = verifier(P, params, args.tol)
                count += 1
                if rep.degenerate:
                    degenerate += 1
                elif max_ratio is None or rep.ratio > max_ratio:
                    max_ratio, max_id = rep.ratio, rep.poly_id
                if len(zs) < args.oracle_checks and not rep.degenerate:
                    z = _oracle_check(P, params, args.tol, derive_seed(args.seed, 7, index), args.oracle_samples)
                    if z is not None:
                        zs.append(z)
                line = {"index": index, "seed": seed, "polynomial": P.to_dict(), "report": rep.to_dict()}
                out.write(dumps_line(line) + "\n")
                out.flush()
        except (QuadratureError, ExpansionBudgetError) as exc:
            out.write(dumps_line({"truncated": True, "error": str(exc), "completed": count}) + "\n")
            raise CliError(f"numerical failure after {count} samples: {exc}", EXIT_NUMERIC) from None
        summary = {
            "summary": {
                "schema_version": "1.0",
                "theorem": args.theorem,
                "params": params.to_dict(),
                "count": count,
                "degenerate_count": degenerate,
                "max_ratio": max_ratio,
                "max_ratio_poly_id": max_id,
                "oracle": {
                    "checked": len(zs),
                    "within_3se": sum(z <= 3.0 for z in zs),
                    "max_z": max(zs) if zs else None,
                },
            }
        }
        out.write(dumps_line(summary) + "\n")
    finally:
        if args.out:
            out.close()
    if args.out:
        run = run_record("verify", _verify_params(args), [{"jsonl": str(args.out)}])
        Path(str(args.out) + ".run.json").write_text(dumps_pretty(run))
    return EXIT_OK


def _verify_params(args) -> dict:
    return {
        k: getattr(args, k)
        for k in ("theorem", "dim", "p", "m", "samples", "seed", "degree", "support", "coef_dist", "sign_mode", "tol", "poly")
    }


def _search_config(args, seed=None) -> SearchConfig:
    return SearchConfig(
        degree=args.degree,
        support=args.support,
        random_budget=args.random_budget,
        climb_budget=args.climb_budget,
        patience=args.patience,
        seed=args.seed if seed is None else seed,
        sign_mode=args.sign_mode,
        tol=args.tol,
    )


def _plot_lines(cells) -> dict[int, list[str]]:
    by_dim: dict[int, list[str]] = {}
    for params, value in cells:
        by_dim.setdefault(params.dim, []).append(f"{float(params.p)!r} {value!r}")
    return by_dim


def _write_plots(out: str, cells) -> None:
    for dim, lines in _plot_lines(cells).items():
        Path(f"{out}.plot_N{dim}.txt").write_text("# p A_estimate\n" + "\n".join(lines) + "\n")


def cmd_search_constant(args) -> int:
    params = _params(args.dim, args.p, 1, "1.3")
    if args.random_budget <= 0:
        raise CliError("--random-budget must be positive", EXIT_INPUT)
    est = estimate_constant(params, _search_config(args))
    payload = est.to_dict()
    payload["schema_version"] = "1.0"
    payload["witness_report"] = verify_poincare(est.witness, params, args.tol).to_dict()
    params_d = {"dim": args.dim, "p": args.p, **_search_config(args).to_dict()}
    _emit(dumps_pretty(run_record("search-constant", params_d, [payload])), args.out)
    if args.witness_out:
        Path(args.witness_out).write_text(dumps_pretty(est.witness.to_dict()))
    if args.out:
        _write_plots(args.out, [(params, est.value)])
    return EXIT_OK


def _grid(dims, ps) -> list[SobolevParams]:
    grid = []
    for N in dims:
        for tok in ps:
            if tok == "b":
                p = Fraction(N, N + 1)
            elif tok.startswith("b+"):
                p = Fraction(N, N + 1) + as_fraction(tok[2:])
            else:
                p = as_fraction(tok)
            if not window_check(N, p, 1, "1.3").ok:
                raise CliError(f"grid cell N={N}, p={p} is outside the window", EXIT_WINDOW)
            grid.append(SobolevParams(N, p))
    return grid


def _cell_key(params: SobolevParams, search: SearchConfig) -> str:
    return dumps_line({"params": params.to_dict(), "search": search.to_dict()})


def cmd_sweep(args) -> int:
    grid = _grid(args.dims, args.ps)
    search = _search_config(args)
    previous: dict[str, dict] = {}
    if args.resume and args.out and Path(args.out).exists():
        for rec in read_jsonl(args.out):
            if rec.get("error") is None and "key" in rec:
                previous[rec["key"]] = rec
    keys = [_cell_key(params, search) for params in grid]
    skip = [i for i, k in enumerate(keys) if k in previous]
    fresh = {cell.index: cell for cell in sweep(grid, search, workers=args.workers, skip=skip)}
    lines, plot_cells, failed = [], [], 0
    for i, params in enumerate(grid):
        if i in fresh:
            rec = {"key": keys[i], **fresh[i].to_dict()}
        else:
            rec = previous[keys[i]]
        if rec["error"] is not None:
            failed += 1
        else:
            plot_cells.append((params, rec["estimate"]["value"]))
        lines.append(dumps_line(rec))
    _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    if args.out:
        _write_plots(args.out, plot_cells)
        params_d = {"dims": args.dims, "ps": args.ps, **search.to_dict(), "resumed_cells": skip}
        Path(args.out + ".run.json").write_text(
            dumps_pretty(run_record("sweep", params_d, [{"jsonl": args.out, "failed_cells": failed}]))
        )
    return EXIT_PARTIAL if failed else EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    ap = argparse.ArgumentParser(prog="poincare-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"poincare-lab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="split a polynomial into constant, positive and negative parts")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("norm", help="triple-stroke L^q quasi-norm of a polynomial")
    p.add_argument("file")
    p.add_argument("--q", required=True)
    p.add_argument("--method", choices=["auto", "quad", "mc", "exact"], default="auto")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo sample count")
    p.add_argument("--out")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("monomial-table", help="CSV of the closed-form monomial ratio over a box")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--K", type=int, default=30)
    p.add_argument("--out")
    p.set_defaults(func=cmd_monomial_table)

    def sampling(p):
        p.add_argument("--dim", type=int, required=True)
        p.add_argument("--p", required=True)
        p.add_argument("--seed", type=int, default=seed)
        p.add_argument("--degree", type=int, default=8)
        p.add_argument("--support", type=int, default=4)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out")

    p = sub.add_parser("verify", help="ratio reports for random or given polynomials (JSONL)")
    sampling(p)
    p.add_argument("--theorem", choices=sorted(VERIFIERS), default="1.3")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--coef-dist", dest="coef_dist", choices=["uniform", "log-uniform"], default="uniform")
    p.add_argument("--sign-mode", dest="sign_mode", choices=["mixed", "positive"], default="mixed")
    p.add_argument("--poly", help="verify this polynomial file instead of sampling")
    p.add_argument("--oracle-checks", dest="oracle_checks", type=int, default=3)
    p.add_argument("--oracle-samples", dest="oracle_samples", type=int, default=50_000)
    p.set_defaults(func=cmd_verify)

    def search_opts(p):
        p.add_argument("--random-budget", dest="random_budget", type=int, default=200)
        p.add_argument("--climb-budget", dest="climb_budget", type=int, default=200)
        p.add_argument("--patience", type=int, default=50)
        p.add_argument("--sign-mode", dest="sign_mode", choices=["mixed", "positive"], default="positive")

    p = sub.add_parser("search-constant", help="empirical estimate of A(N, p) for one cell")
    sampling(p)
    search_opts(p)
    p.add_argument("--witness-out", dest="witness_out")
    p.set_defaults(func=cmd_search_constant)

    p = sub.add_parser("sweep", help="constant estimates over a grid of (N, p)")
    p.add_argument("--dims", type=int, nargs="+", required=True)
    p.add_argument("--ps", nargs="+", required=True, help="values, fractions, 'b' (= N/(N+1)) or 'b+eps'")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--support", type=int, default=4)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--out")
    search_opts(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PolynomialError, SchemaError, SignError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (WindowError, ExponentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except (QuadratureError, ExpansionBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
