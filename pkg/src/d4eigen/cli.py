"""Command-line entry point: `d4eigen <command> [options]`.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors.  Results go to stdout; timings go to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath as mp

from .acceptance import DEFAULT_SEED, CRITERIA, SuiteConfig, run_criteria, selftest_report
from .eigenfunctions import PrecisionError, f_minus, f_plus
from .lattice import poisson_residual, sign_scan
from .modular import CrossCheckError, EvaluationError, Law, eval_form, eval_g, random_points, transform_residual
from .precision import PrecisionCtx
from .qseries import (Identity, SeriesError, SeriesId, build_series, identity_residual,
                      load_series, save_series)
from .radial_fourier import HankelError, HankelQuadSpec, eigen_residual
from .report import emit

CACHE_ENV = "D4EIGEN_CACHE"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    precision_digits: int = 64
    series_order: int = 400
    tolerance: float = 1e-8
    format: str = "json"
    cache_dir: Optional[Path] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.precision_digits < 30:
            raise UsageError(f"--digits must be >= 30, got {self.precision_digits}")
        if self.series_order < 8:
            raise UsageError(f"--order must be >= 8, got {self.series_order}")
        if not self.tolerance > 0:
            raise UsageError("--tol must be positive")

    @property
    def prec(self) -> PrecisionCtx:
        return PrecisionCtx(self.precision_digits)


def parse_grid(text: str):
    """'a:b:h' -> exact rational points a, a+h, ..., up to b inclusive."""
    try:
        a, b, h = (Fraction(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like a:b:h, got {text!r}") from None
    if h <= 0 or b < a:
        raise UsageError(f"grid {text!r} needs h > 0 and b >= a")
    n = int((b - a) / h)
    if n > 100_000:
        raise UsageError("grid has more than 100000 points")
    return [a + k * h for k in range(n + 1)]


def _mpf(q, dps: int = 120) -> mp.mpf:
    q = Fraction(q)
    with mp.workdps(dps):
        return mp.mpf(q.numerator) / q.denominator


def _common(p: argparse.ArgumentParser):
    p.add_argument("--digits", type=int, default=64, help="working precision in decimal digits (>= 30)")
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance for numeric checks")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--cache-dir", default=None, help=f"series cache directory (default ${CACHE_ENV})")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _common(common)
    parser = argparse.ArgumentParser(prog="d4eigen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="print q-expansion coefficients")
    p.add_argument("tag", help="|".join(s.value for s in SeriesId))
    p.add_argument("--order", type=int, default=400, help="truncation order in u = q^(1/8) units")

    p = sub.add_parser("identities", parents=[common], help="exact identity residuals")
    p.add_argument("--order", type=int, default=400)

    p = sub.add_parser("transforms", parents=[common], help="numeric transformation-law residuals")
    p.add_argument("--points", type=int, default=20)

    p = sub.add_parser("eval", parents=[common], help="phi(it) or g(t) on the imaginary axis")
    p.add_argument("what", choices=("phi", "g"))
    p.add_argument("--t", required=True)

    for name in ("fplus", "fminus"):
        p = sub.add_parser(name, parents=[common], help=f"{name[1:]} eigenfunction values")
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--r")
        g.add_argument("--grid", help="a:b:h")
        if name == "fminus":
            p.add_argument("--route", choices=("ClosedSeries", "Quadrature"), default="ClosedSeries")

    p = sub.add_parser("fourier-check", parents=[common], help="Hankel-oracle eigen residual")
    p.add_argument("which", choices=("plus", "minus"))
    p.add_argument("--grid", default="1/4:4:1/4")

    p = sub.add_parser("poisson", parents=[common], help="Poisson-summation residual over D4")
    p.add_argument("--rmax", default="6")

    p = sub.add_parser("scan", parents=[common], help="sign scan report")
    p.add_argument("which", choices=("plus", "minus"))
    p.add_argument("--rmin", default=None)
    p.add_argument("--rmax", default="6")
    p.add_argument("--step", default="1/100")
    p.add_argument("--scan-tol", default="1e-10")

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma list / ranges, e.g. 1-5,9")
    return parser


def _config(ns) -> CliConfig:
    cache = ns.cache_dir or os.environ.get(CACHE_ENV)
    return CliConfig(
        precision_digits=ns.digits,
        series_order=getattr(ns, "order", 400),
        tolerance=ns.tol,
        format=ns.format,
        cache_dir=Path(cache) if cache else None,
        seed=ns.seed,
    )


def _cached_series(sid: SeriesId, order: int, cache_dir: Optional[Path]):
    if cache_dir is None:
        return build_series(sid, order)
    path = cache_dir / f"{sid.value}-{order}.qs"
    if path.exists():
        tag, s = load_series(path)
        if tag == sid.value and s.order == order:
            return s
    s = build_series(sid, order)
    save_series(s, path, sid.value)
    return s


def _parse_criteria(text):
    if not text:
        return None
    out = set()
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = part.split("-")
                out.update(range(int(a), int(b) + 1))
            else:
                out.add(int(part))
    except ValueError:
        raise UsageError(f"bad --criteria {text!r}") from None
    if not out <= set(CRITERIA):
        raise UsageError(f"criteria must be within 1..{len(CRITERIA)}")
    return sorted(out)


def _eval_points(ns):
    if ns.r is not None:
        try:
            return [Fraction(ns.r)]
        except ValueError:
            raise UsageError(f"--r must be a number, got {ns.r!r}") from None
    return parse_grid(ns.grid)


def run(ns, out) -> int:
    cfg = _config(ns)
    prec = cfg.prec
    cmd = ns.command
    status = EXIT_OK
    if cmd == "series":
        try:
            sid = SeriesId.parse(ns.tag)
        except SeriesError as exc:
            raise UsageError(str(exc)) from None
        report = _cached_series(sid, cfg.series_order, cfg.cache_dir)
    elif cmd == "identities":
        report = {}
        for ident in Identity:
            res = identity_residual(ident, cfg.series_order)
            report[ident.value] = "zero" if res.is_zero() else "nonzero"
            if not res.is_zero():
                status = EXIT_FAIL
    elif cmd == "transforms":
        if ns.points < 1:
            raise UsageError("--points must be >= 1")
        reps = [transform_residual(law, p, prec, tolerance=mp.mpf("1e-30"))
                for p in random_points(ns.points, cfg.seed) for law in Law]
        if not all(r.passed for r in reps):
            status = EXIT_FAIL
        if cfg.format == "json":
            report = {"seed": cfg.seed, "residuals": [_residual_obj(r) for r in
                                                      sorted(reps, key=lambda r: r.law.value)]}
        else:
            out.write(f"# seed={cfg.seed}\n".encode())
            report = reps
    elif cmd == "eval":
        report = _axis_eval(ns.what, ns.t, prec)
    elif cmd in ("fplus", "fminus"):
        pts = _eval_points(ns)
        if cmd == "fplus":
            report = [f_plus(_mpf(r), prec) for r in pts]
        else:
            if any(r <= 0 for r in pts):
                raise UsageError("fminus needs r > 0")
            report = [f_minus(_mpf(r), prec, ns.route) for r in pts]
    elif cmd == "fourier-check":
        grid = parse_grid(ns.grid)
        report = eigen_residual(ns.which, [_mpf(s) for s in grid], HankelQuadSpec(tol=cfg.tolerance))
        if not report.passed:
            status = EXIT_FAIL
    elif cmd == "poisson":
        report = poisson_residual(_mpf(Fraction(ns.rmax)), prec, tolerance=cfg.tolerance)
        if not report.passed:
            status = EXIT_FAIL
    elif cmd == "scan":
        rmin = ns.rmin or ("1/2" if ns.which == "plus" else "1/5")
        report = sign_scan(ns.which, Fraction(rmin), Fraction(ns.rmax), Fraction(ns.step),
                           tol=mp.mpf(ns.scan_tol))
        if not report.passed:
            status = EXIT_FAIL
    elif cmd == "selftest":
        scfg = SuiteConfig(digits=cfg.precision_digits, seed=cfg.seed)
        results = run_criteria(scfg, _parse_criteria(ns.criteria), log=sys.stderr)
        report = selftest_report(results, scfg)
        if cfg.format == "csv":
            report = {f"criterion_{r.number}": "pass" if r.passed else "fail" for r in results}
        if not all(r.passed for r in results):
            status = EXIT_FAIL
    else:  # pragma: no cover
        raise UsageError(f"unknown command {cmd}")
    out.write(emit(report, cfg.format))
    return status


def _residual_obj(r):
    d = r.as_dict()
    d.pop("pass")
    d["pass"] = r.passed
    return d


def _axis_eval(what, t_text, prec):
    try:
        t = Fraction(t_text)
    except ValueError:
        raise UsageError(f"--t must be a number, got {t_text!r}") from None
    if t <= 0:
        raise UsageError("--t must be positive")
    t = _mpf(t)
    with mp.workdps(prec.dps + 5):
        if what == "phi":
            v = eval_form(SeriesId.Phi, mp.mpc(0, t), prec).real if t >= 1 else \
                eval_form(SeriesId.Psi, mp.mpc(0, 1 / t), prec).real
            if mp.mpf(1) / 4 <= t <= 4:
                w = eval_form(SeriesId.Psi, mp.mpc(0, 1 / t), prec).real if t >= 1 else \
                    eval_form(SeriesId.Phi, mp.mpc(0, t), prec).real
                err = abs(v - w) + prec.eps * max(1, abs(v))
            else:
                err = prec.eps * max(1, abs(v))
        else:
            v = eval_g(t, prec)
            err = prec.eps * max(1, abs(v), t * t)
    from .eigenfunctions import EigenEval, Route
    return [EigenEval(t, v, err, Route.Direct)]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    t0 = time.perf_counter()
    out = sys.stdout.buffer
    try:
        code = run(ns, out)
    except UsageError as exc:
        print(f"d4eigen: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, HankelError, EvaluationError, CrossCheckError) as exc:
        print(f"d4eigen: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"d4eigen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.flush()
    print(f"[d4eigen] {ns.command} took {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
