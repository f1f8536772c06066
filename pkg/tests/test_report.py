import json
from fractions import Fraction

import mpmath as mp

from d4eigen.eigenfunctions import f_plus
from d4eigen.lattice import enumerate_norms
from d4eigen.modular import Law, random_points, transform_residual
from d4eigen.precision import PrecisionCtx
from d4eigen.qseries import SeriesId, build_series
from d4eigen.report import emit, fmt_exp, fmt_real

P = PrecisionCtx(30)


def test_norm_table_json():
    assert json.loads(emit(enumerate_norms("D4", 6))) == {"2": 24, "4": 24, "6": 96}


def test_norm_table_csv():
    assert emit(enumerate_norms("D4", 4), "csv") == b"norm,count\n2,24\n4,24\n"


def test_eval_csv_header():
    text = emit([f_plus(mp.mpf(1), P), f_plus(mp.mpf(2), P)], "csv").decode()
    lines = text.splitlines()
    assert lines[0] == "r,value,err" and len(lines) == 3


def test_series_exponents_are_rationals():
    obj = json.loads(emit(build_series(SeriesId.Phi, 16)))
    assert obj["terms"][:3] == [["-1", "1"], ["0", "-24"], ["1/2", "4096"]]
    assert fmt_exp(Fraction(3, 8)) == "3/8" and fmt_exp(2) == "2"


def test_residuals_sorted_by_law():
    p = random_points(1, 7)[0]
    reps = [transform_residual(law, p, P) for law in reversed(list(Law))]
    laws = [row["law"] for row in json.loads(emit(reps))]
    assert laws == sorted(laws)


def test_reals_keep_their_digits():
    with mp.workdps(50):
        x = +mp.pi
    assert fmt_real(x, 40).startswith("3.141592653589793238462643383279502884197")


def test_unknown_format():
    import pytest
    with pytest.raises(ValueError):
        emit({"a": "b"}, "xml")
