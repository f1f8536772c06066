"""CSV and JSON serialization of every report the CLI prints.

Schemas are listed in FORMATS.md.  Reals are printed as decimal strings
(JSON strings, so no digits are lost to binary floats), error fields carry
three significant digits, and q-exponents are exact rationals `p/q`.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import mpmath as mp

from .eigenfunctions import EigenEval
from .lattice import NormCountTable, PoissonReport, SignScanReport
from .modular import ResidualReport
from .precision import to_mpf
from .qseries import HalfStepSeries
from .radial_fourier import EigenResidual

__all__ = ["FORMAT_VERSION", "emit", "fmt_real", "fmt_err", "fmt_exp", "series_rows"]

FORMAT_VERSION = "1"
VALUE_DIGITS = 25


def _exact(x):
    # mp.mpf(x) would round to the ambient precision
    return x if isinstance(x, mp.mpf) else to_mpf(x)


def fmt_real(x, digits: int = VALUE_DIGITS) -> str:
    return mp.nstr(_exact(x), digits, min_fixed=-6, max_fixed=15)


def fmt_err(x) -> str:
    return mp.nstr(_exact(x), 3, min_fixed=-6, max_fixed=15)


def fmt_exp(e) -> str:
    e = Fraction(e)
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


def series_rows(s: HalfStepSeries):
    """(q-exponent, coefficient) for the nonzero terms."""
    return [(fmt_exp(Fraction(e, 8)), str(c)) for e, c in s.items() if c != 0]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _eval_row(ev: EigenEval):
    return [fmt_real(ev.r), fmt_real(ev.value), fmt_err(ev.err)]


def _table(report):
    """(header, rows, json object) for a report."""
    if isinstance(report, HalfStepSeries):
        rows = series_rows(report)
        return ["q_exp", "coeff"], rows, {"order_q": fmt_exp(Fraction(report.order, 8)),
                                          "terms": [list(r) for r in rows]}
    if isinstance(report, NormCountTable):
        d = report.as_json_dict()
        return ["norm", "count"], list(d.items()), d
    if isinstance(report, EigenEval):
        report = [report]
    if isinstance(report, list) and report and isinstance(report[0], EigenEval):
        rows = [_eval_row(ev) for ev in report]
        return ["r", "value", "err"], rows, [dict(zip(["r", "value", "err"], r)) for r in rows]
    if isinstance(report, list) and report and isinstance(report[0], ResidualReport):
        items = sorted(report, key=lambda r: r.law.value)
        header = ["law", "x", "y", "residual", "tolerance", "pass"]
        rows = [[r.law.value, fmt_real(r.point.x, 20), fmt_real(r.point.y, 20),
                 fmt_err(r.residual_abs), fmt_err(r.tolerance), str(r.passed).lower()]
                for r in items]
        objs = [{"law": a, "x": b, "y": c, "residual": d, "tolerance": e, "pass": f == "true"}
                for a, b, c, d, e, f in rows]
        return header, rows, objs
    if isinstance(report, SignScanReport):
        rows = [[fmt_real(r), fmt_real(v), fmt_err(e)] for r, v, e in report.samples]
        obj = report.summary()
        obj["samples"] = [dict(zip(["r", "value", "err"], row)) for row in rows]
        return ["r", "value", "err"], rows, obj
    if isinstance(report, PoissonReport):
        keys = ["r_max", "lhs", "lhs_err", "rhs", "rhs_err", "tail", "residual", "tolerance"]
        vals = [fmt_real(report.r_max, 6), fmt_real(report.lhs), fmt_err(report.lhs_err),
                fmt_real(report.rhs), fmt_err(report.rhs_err), fmt_err(report.tail),
                fmt_err(report.residual), fmt_err(report.tolerance)]
        obj = dict(zip(keys, vals))
        obj["pass"] = report.passed
        return keys + ["pass"], [vals + [str(report.passed).lower()]], obj
    if isinstance(report, EigenResidual):
        header = ["s", "transform", "transform_err", "value", "err", "residual"]
        rows = [[fmt_real(s, 10), fmt_real(t, 15), fmt_err(te), fmt_real(v, 15), fmt_err(e),
                 fmt_err(res)] for s, t, te, v, e, res in report.rows]
        obj = {"which": report.which.name, "tol": fmt_err(report.tol),
               "max_residual": fmt_err(report.max_residual),
               "argmax": fmt_real(report.argmax, 10), "pass": report.passed,
               "rows": [dict(zip(header, r)) for r in rows]}
        return header, rows, obj
    if isinstance(report, dict):
        rows = [[k, v if isinstance(v, str) else json.dumps(v)] for k, v in report.items()]
        return ["key", "value"], rows, report
    raise TypeError(f"no serializer for {type(report).__name__}")


def emit(report, fmt: str = "json") -> bytes:
    """Serialize a report as CSV or JSON bytes (UTF-8, '\\n' line ends)."""
    header, rows, obj = _table(report)
    if fmt == "csv":
        text = _csv(header, rows)
    elif fmt == "json":
        text = _json(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")
