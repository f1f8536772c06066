"""The acceptance suite: twelve numbered checks with deterministic reports.

Each check returns a `CriterionResult` whose `detail` holds only strings and
booleans, so two runs with the same seed serialize to identical bytes.
Wall-clock times are kept separately and never enter the report.
"""
from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import bessel, eigenfunctions, lattice, modular, qseries, radial_fourier
from .eigenfunctions import a_direct, f_minus, f_plus, zero_check
from .lattice import (LatticeModel, enumerate_norms, poisson_residual, sign_scan,
                      theta_crosscheck)
from .modular import Law, eval_form, eval_phi_imag_axis, random_points, transform_residual
from .precision import PrecisionCtx
from .qseries import Identity, SeriesId, build_series, coefficient, identity_residual
from .radial_fourier import HankelQuadSpec, eigen_residual, gaussian_handle, hankel4
from .report import fmt_err, fmt_real

__all__ = ["CriterionResult", "CRITERIA", "run_criteria", "selftest_report", "DEFAULT_SEED"]

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self):
        return {"id": self.number, "title": self.title, "pass": self.passed, "detail": self.detail}

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"


@dataclass(frozen=True)
class SuiteConfig:
    digits: int = 64
    seed: int = DEFAULT_SEED
    order: int = 400


def _timed_limit(seconds, limit):
    return {"time_limit_s": str(limit), "within_time": seconds < limit}


# ---------------------------------------------------------------------------


def c1_identities(cfg: SuiteConfig):
    t0 = time.perf_counter()
    out = {}
    ok = True
    for ident in (Identity.Jacobi, Identity.FuncEq1, Identity.DeltaCross):
        res = identity_residual(ident, cfg.order)
        out[ident.value] = "zero" if res.is_zero() else f"nonzero at u^{min(e for e, c in res.items() if c)}"
        ok &= res.is_zero()
    secs = time.perf_counter() - t0
    out["through_q"] = str(Fraction(cfg.order, 8))
    return ok and secs < 5 and cfg.order >= 400, out, secs, 5


def c2_phi_expansion(cfg: SuiteConfig):
    phi = build_series(SeriesId.Phi, 16)
    psi = build_series(SeriesId.Psi, 16)
    got = [coefficient(phi, Fraction(e)) for e in (-1, 0, Fraction(1, 2), 1)]
    want = [1, -24, 4096, -98028]
    lead = psi.min_exp, psi[psi.min_exp]
    ok = got == want and lead == (4, 8192)
    return ok, {"phi": [str(c) for c in got], "psi_leading_q_exp": str(Fraction(lead[0], 8)),
                "psi_leading_coeff": str(lead[1])}, None, None


def c3_theta_powers(cfg: SuiteConfig):
    exps = [Fraction(k, 2) for k in range(5)]
    want = {SeriesId.Theta2: [0, 16, 0, 64, 0], SeriesId.Theta3: [1, 8, 24, 32, 24],
            SeriesId.Theta4: [1, -8, 24, -32, 24]}
    detail = {}
    ok = True
    for sid, w in want.items():
        s = build_series(sid, 32) ** 4
        got = [int(coefficient(s, e)) for e in exps]
        detail[sid.value + "^4"] = [str(c) for c in got]
        ok &= got == w
    return ok, detail, None, None


def c4_numeric_laws(cfg: SuiteConfig):
    prec = PrecisionCtx(cfg.digits)
    t0 = time.perf_counter()
    worst = {}
    ok = True
    tol = mp.mpf("1e-30")
    for p in random_points(20, cfg.seed):
        for law in Law:
            rep = transform_residual(law, p, prec, tolerance=tol)
            worst[law.value] = max(worst.get(law.value, mp.mpf(0)), rep.residual_abs)
            ok &= rep.passed
    with mp.workdps(prec.dps):
        e2 = eval_form(SeriesId.E2, mp.mpc(0, 1), prec).real
        e2_err = abs(e2 - 3 / mp.pi)
    ok &= e2_err < mp.mpf("1e-40")
    secs = time.perf_counter() - t0
    detail = {"seed": str(cfg.seed), "points": "20",
              "worst": {k: fmt_err(v) for k, v in sorted(worst.items())},
              "E2(i)-3/pi": fmt_err(e2_err)}
    return ok and secs < 30, detail, secs, 30


def c5_decay(cfg: SuiteConfig):
    prec = PrecisionCtx(cfg.digits)
    with mp.workdps(prec.dps):
        big = eval_phi_imag_axis(5, prec) * mp.exp(-10 * mp.pi)
        small = eval_phi_imag_axis(mp.mpf("0.05"), prec) * mp.exp(mp.pi / mp.mpf("0.05"))
    ok = abs(big - 1) <= mp.mpf("1e-6") and abs(small - 8192) < 1
    return ok, {"phi(5i)e^(-10pi)": fmt_real(big, 20), "phi(0.05i)e^(20pi)": fmt_real(small, 20)}, None, None


def c6_routes(cfg: SuiteConfig):
    prec = PrecisionCtx(cfg.digits)
    t0 = time.perf_counter()
    cap = mp.mpf("1e-20")
    worst_p = worst_m = mp.mpf(0)
    ok = True
    for k in range(1, 51):
        r = Fraction(145, 100) + k * Fraction(355, 5000)
        r = mp.mpf(r.numerator) / r.denominator
        a, b = f_plus(r, prec), a_direct(r, prec)
        d = abs(a.value - b.value)
        worst_p = max(worst_p, d)
        ok &= d <= a.err + b.err and d <= cap
    for k in range(1, 51):
        r = Fraction(1, 10) + k * Fraction(49, 500)
        r = mp.mpf(r.numerator) / r.denominator
        a, b = f_minus(r, prec, "ClosedSeries"), f_minus(r, prec, "Quadrature")
        d = abs(a.value - b.value)
        worst_m = max(worst_m, d)
        ok &= d <= a.err + b.err and d <= cap
    secs = time.perf_counter() - t0
    return ok and secs < 120, {"f_plus_max_diff": fmt_err(worst_p),
                               "f_minus_max_diff": fmt_err(worst_m)}, secs, 120


def c7_fourier(cfg: SuiteConfig):
    t0 = time.perf_counter()
    detail = {}
    spec = HankelQuadSpec(tol=1e-11)
    gauss = mp.mpf(0)
    for t in (1, Fraction(5, 2)):
        tt = mp.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else mp.mpf(t)
        for s in ("0", "0.5", "1.5", "3"):
            v, _ = hankel4(gaussian_handle(tt), mp.mpf(s), spec)
            with mp.workdps(40):
                gauss = max(gauss, abs(v - tt ** -2 * mp.exp(-mp.pi * mp.mpf(s) ** 2 / tt)))
    detail["gaussian_max_residual"] = fmt_err(gauss)
    ok = gauss < mp.mpf("1e-10")
    grid = [mp.mpf(k) / 4 for k in range(1, 17)]
    bar = mp.mpf("1e-6")
    for which in ("plus", "minus"):
        res = eigen_residual(which, grid, HankelQuadSpec(tol=1e-8))
        detail[which] = {"max_residual": fmt_err(res.max_residual),
                         "argmax": fmt_real(res.argmax, 6)}
        ok &= res.max_residual < bar
    secs = time.perf_counter() - t0
    return ok and secs < 600, detail, secs, 600


def c8_sign_radius(cfg: SuiteConfig):
    detail = {}
    ok = True
    for which, r_min in (("plus", Fraction(1, 2)), ("minus", Fraction(1, 5))):
        rep = sign_scan(which, r_min, 6, Fraction(1, 100), tol=1e-10)
        last = rep.last_sign_change
        in_band = last is not None and mp.mpf("1.414") <= last <= mp.mpf("1.415")
        this = in_band and not rep.violations and bool(rep.negatives_below)
        detail[which] = {
            "last_sign_change": "none" if last is None else fmt_real(last, 13),
            "last_sign_change_in_band": in_band,
            "violations_beyond_sqrt2": str(len(rep.violations)),
            "negative_points_in_(1.0,1.4)": str(len(rep.negatives_below)),
            "min_beyond_last_change": fmt_real(rep.min_beyond, 10),
            "pass": this,
        }
        ok &= this
    return ok, detail, None, None


def c9_special_values(cfg: SuiteConfig):
    prec = PrecisionCtx(cfg.digits)
    z = f_plus(0, prec)
    ok = z.value == 0 and z.err == 0
    detail = {"f_plus(0)": fmt_real(z.value), "f_plus(0)_err": fmt_err(z.err)}
    for k in range(1, 6):
        value, allowance = zero_check(f_plus, k, prec)
        ok &= abs(value) <= allowance
        detail[f"f_plus(sqrt({2 * k}))"] = f"{fmt_err(value)} +- {fmt_err(allowance)}"
    return ok, detail, None, None


def c10_lattice(cfg: SuiteConfig):
    t0 = time.perf_counter()
    rows = theta_crosscheck(20)
    d4 = enumerate_norms("D4", 20)
    dual = enumerate_norms("D4dual", 4)
    m = LatticeModel.d4()
    prod = m.covolume * m.dual().covolume
    first = min(dual.entries)
    ok = (all(r[3] == 0 for r in rows) and [d4.count(n) for n in (2, 4, 6)] == [24, 24, 96]
          and first == 1 and dual.entries[first] == 24 and prod == 1)
    secs = time.perf_counter() - t0
    return ok and secs < 5, {"d4_counts_2_4_6": [str(d4.count(n)) for n in (2, 4, 6)],
                             "theta_rows_checked": str(len(rows)),
                             "dual_min_norm": str(first), "dual_min_count": str(dual.entries[first]),
                             "covolume_product": str(prod)}, secs, 5


def c11_poisson(cfg: SuiteConfig):
    prec = PrecisionCtx(cfg.digits)
    reps = [poisson_residual(R, prec) for R in (4, 6, 8)]
    res = [r.residual for r in reps]
    ok = res[1] < mp.mpf("1e-8") and res[0] > res[1] > res[2]
    return ok, {f"residual_R{R}": fmt_err(r) for R, r in zip((4, 6, 8), res)}, None, None


_FAST = (1, 2, 3, 4, 9, 10, 11)


def clear_caches():
    for mod in (qseries, modular, eigenfunctions, bessel, lattice, radial_fourier):
        for obj in vars(mod).values():
            if callable(getattr(obj, "cache_clear", None)):
                obj.cache_clear()


def c12_determinism(cfg: SuiteConfig, first_pass=None):
    """Re-run the seeded and exact checks with cold caches and compare bytes."""
    def body(results):
        return json.dumps([r.as_dict() for r in results if r.number in _FAST], sort_keys=True)

    if first_pass is None:
        first_pass = run_criteria(cfg, _FAST)
    clear_caches()
    again = run_criteria(cfg, _FAST)
    same = body(first_pass) == body(again)
    return same, {"rechecked": [str(n) for n in _FAST], "identical": same}, None, None


CRITERIA = {
    1: ("exact identity suite", c1_identities),
    2: ("phi expansion and psi leading term", c2_phi_expansion),
    3: ("theta fourth-power coefficients", c3_theta_powers),
    4: ("numeric transformation laws", c4_numeric_laws),
    5: ("decay at the cusps", c5_decay),
    6: ("route agreement", c6_routes),
    7: ("eigenfunction certificates", c7_fourier),
    8: ("sign radius sqrt(2) for both", c8_sign_radius),
    9: ("special values", c9_special_values),
    10: ("lattice suite", c10_lattice),
    11: ("Poisson residual", c11_poisson),
    12: ("determinism", c12_determinism),
}


def run_criteria(cfg: SuiteConfig = SuiteConfig(), numbers=None, log=None):
    numbers = sorted(numbers or CRITERIA)
    results = []
    for n in numbers:
        title, fn = CRITERIA[n]
        t0 = time.perf_counter()
        if n == 12:
            prior = [r for r in results if r.number in _FAST]
            ok, detail, _, limit = fn(cfg, prior if len(prior) == len(_FAST) else None)
        else:
            ok, detail, _, limit = fn(cfg)
        secs = time.perf_counter() - t0
        if limit is not None:
            detail.update(_timed_limit(secs, limit))
        res = CriterionResult(n, title, bool(ok), detail, secs)
        results.append(res)
        if log is not None:
            print(f"{res.line()}  ({secs:.1f} s)", file=log, flush=True)
    return results


def selftest_report(results, cfg: SuiteConfig):
    return {
        "format_version": "1",
        "seed": str(cfg.seed),
        "digits": str(cfg.digits),
        "criteria": [r.as_dict() for r in results],
        "pass": all(r.passed for r in results),
    }


if __name__ == "__main__":  # pragma: no cover
    for r in run_criteria(log=sys.stderr):
        print(r.line())
