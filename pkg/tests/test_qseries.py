from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d4eigen.qseries import (HalfStepSeries, Identity, SeriesError, SeriesId,
                             TruncationError, build_series, coefficient, identity_residual,
                             laplace_terms, load_series, save_series, series_inverse,
                             series_mul, shift_T)

ORDER = 40


def series_strategy(order=ORDER, lo=-8, hi=8):
    return st.builds(
        lambda m, cs: HalfStepSeries(m, cs, order),
        st.integers(lo, hi),
        st.lists(st.integers(-50, 50), min_size=1, max_size=12),
    )


def q(s, e):
    return coefficient(s, Fraction(e))


def test_phi_leading_terms():
    phi = build_series(SeriesId.Phi, 16)
    assert [q(phi, e) for e in (-1, 0, Fraction(1, 2), 1)] == [1, -24, 4096, -98028]


def test_psi_is_supported_on_odd_half_powers():
    psi = build_series(SeriesId.Psi, 200)
    assert psi.min_exp == 4 and psi[4] == 8192
    assert all(e % 8 == 4 for e, _ in psi.items())


def test_theta_fourth_powers():
    t2, t3, t4 = (build_series(s, 32) ** 4 for s in (SeriesId.Theta2, SeriesId.Theta3, SeriesId.Theta4))
    exps = [Fraction(k, 2) for k in range(5)]
    assert [q(t2, e) for e in exps] == [0, 16, 0, 64, 0]
    assert [q(t3, e) for e in exps] == [1, 8, 24, 32, 24]
    assert [q(t4, e) for e in exps] == [1, -8, 24, -32, 24]


def test_delta_starts_with_tau():
    d = build_series(SeriesId.Delta, 48)
    assert [q(d, n) for n in range(1, 6)] == [1, -24, 252, -1472, 4830]


def test_eisenstein_leading():
    assert q(build_series(SeriesId.E2, 16), 1) == -24
    assert q(build_series(SeriesId.E4, 16), 1) == 240
    assert q(build_series(SeriesId.E6, 16), 1) == -504


@pytest.mark.parametrize("ident", list(Identity))
def test_identities_vanish(ident):
    assert identity_residual(ident, 400).is_zero()


def test_shift_T_maps_phi_to_phit():
    assert shift_T(build_series(SeriesId.Phi, 200)) == build_series(SeriesId.PhiT, 200)


def test_shift_T_rejects_quarter_powers():
    with pytest.raises(SeriesError):
        shift_T(build_series(SeriesId.Theta2, 40))


def test_named_series_are_integral():
    for sid in SeriesId:
        assert build_series(sid, 80).is_integral()


def test_order_floor():
    with pytest.raises(SeriesError):
        build_series(SeriesId.Phi, 4)


def test_truncation_is_enforced():
    s = build_series(SeriesId.Theta3, 16)
    with pytest.raises(TruncationError):
        s[17]
    assert s[-3] == 0  # below the leading term is a known zero


def test_inverse_tracks_order():
    d = build_series(SeriesId.Delta, 100)
    inv = series_inverse(d)
    assert inv.min_exp == -8 and inv.order == 100 - 16
    assert series_mul(d, inv) == HalfStepSeries.one(inv.order + d.min_exp)


def test_laplace_terms_rates():
    terms = laplace_terms(build_series(SeriesId.Phi, 16))
    assert terms[:3] == [(Fraction(-2), 1), (Fraction(0), -24), (Fraction(1), 4096)]


def test_cache_roundtrip(tmp_path):
    s = build_series(SeriesId.Psi, 120)
    path = tmp_path / "psi.qs"
    save_series(s, path, "psi")
    tag, back = load_series(path)
    assert tag == "psi" and back == s and back.order == s.order


def test_cache_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.qs"
    p.write_text("hello\n1\n")
    with pytest.raises(SeriesError):
        load_series(p)


@settings(max_examples=60, deadline=None)
@given(series_strategy(), series_strategy())
def test_mul_commutes(a, b):
    assert series_mul(a, b) == series_mul(b, a)


@settings(max_examples=40, deadline=None)
@given(series_strategy(), series_strategy(), series_strategy())
def test_mul_associates(a, b, c):
    assert series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))


@settings(max_examples=40, deadline=None)
@given(series_strategy())
def test_inverse_is_inverse(a):
    if a.is_zero():
        return
    prod = series_mul(a, series_inverse(a))
    assert prod == HalfStepSeries.one(prod.order)


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.lists(st.integers(-20, 20), min_size=1, max_size=10))
def test_shift_T_is_an_involution(m, cs):
    # spread the coefficients on exponents divisible by 4
    terms = {4 * (m + i): c for i, c in enumerate(cs)}
    a = HalfStepSeries.from_terms(terms, 60)
    assert shift_T(shift_T(a)) == a
