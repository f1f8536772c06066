from fractions import Fraction
from itertools import product

import mpmath as mp
import pytest

from d4eigen.lattice import (LatticeModel, NormCountTable, enumerate_norms, poisson_residual,
                             sign_scan, theta_crosscheck, vectors)
from d4eigen.precision import PrecisionCtx


def brute_d4(max_norm):
    counts = {}
    rng = range(-3, 4)
    for v in product(rng, repeat=4):
        n = sum(c * c for c in v)
        if 0 < n <= max_norm and sum(v) % 2 == 0:
            counts[n] = counts.get(n, 0) + 1
    return counts


def test_d4_counts():
    t = enumerate_norms("D4", 8)
    assert [t.count(n) for n in (2, 4, 6, 8)] == [24, 24, 96, 24]
    assert t.entries == brute_d4(8)


def test_counts_follow_sigma():
    # r_D4(2n) = 24 sigma_1^odd(n)
    t = enumerate_norms("D4", 40)
    for n in range(1, 21):
        odd = sum(d for d in range(1, n + 1) if n % d == 0 and d % 2 == 1)
        assert t.count(2 * n) == 24 * odd


def test_count_beyond_table_is_refused():
    with pytest.raises(ValueError):
        enumerate_norms("D4", 4).count(6)


def test_dual_is_a_rescaled_copy():
    dual = enumerate_norms("D4dual", 10)
    d4 = enumerate_norms("D4", 20)
    assert min(dual.entries) == 1 and dual.entries[1] == 24
    for n in range(1, 11):
        assert dual.count(n) == d4.count(2 * n)


def test_integral_pairing():
    d4 = list(vectors("D4", 4))
    dual = list(vectors("D4dual", 3))
    for v in d4:
        for w in dual:
            assert sum(a * b for a, b in zip(v, w)).denominator == 1


def test_membership_and_covolumes():
    m = LatticeModel.d4()
    assert m.covolume == 2 and m.dual().covolume == Fraction(1, 2)
    assert m.contains((1, 1, 0, 0)) and not m.contains((1, 0, 0, 0))
    assert m.dual().contains((Fraction(1, 2),) * 4) and m.dual().contains((1, 0, 0, 0))
    assert m.dual().dual().covolume == 2


def test_theta_crosscheck_through_20():
    rows = theta_crosscheck(20)
    assert rows and all(diff == 0 for *_, diff in rows)


def test_json_dict():
    assert enumerate_norms("D4", 6).as_json_dict() == {"2": 24, "4": 24, "6": 96}
    assert isinstance(enumerate_norms("D4dual", 2), NormCountTable)


def test_poisson_residual_shrinks():
    P = PrecisionCtx(40)
    reps = [poisson_residual(R, P) for R in (4, 6)]
    assert reps[0].residual > reps[1].residual
    assert reps[1].passed and reps[1].residual < mp.mpf("1e-8")


def test_small_plus_scan():
    rep = sign_scan("plus", Fraction(13, 10), 2, Fraction(1, 20))
    assert rep.passed
    assert abs(rep.last_sign_change - mp.sqrt(2)) < mp.mpf("1e-10")
    assert rep.negatives_below


def test_minus_scan_sign_change_is_not_at_sqrt2():
    rep = sign_scan("minus", Fraction(2, 5), Fraction(17, 10), Fraction(1, 20))
    assert rep.passed
    assert abs(rep.last_sign_change - mp.mpf("0.542669210655")) < mp.mpf("1e-9")
