import mpmath as mp
import pytest

from d4eigen.eigenfunctions import (EigenfunctionId, Route, a_direct, f_minus,
                                    f_plus, forced_zeros, hurwitz_zeta, minus_leading,
                                    minus_leading_transform, minus_remainder_bound,
                                    plus_envelope, sin2_over_pole, zero_check)
from d4eigen.precision import PrecisionCtx

P = PrecisionCtx(40)


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def minus_by_bessel(r, terms=200):
    """Third route for f_minus: B = 1/(pi x) - 48 sum sigma_1(n) sqrt(2n/x) K_1(2 pi sqrt(2 n x))."""
    with mp.workdps(60):
        x = mp.mpf(r) ** 2
        b = 1 / (mp.pi * x) - 48 * mp.fsum(
            sigma1(n) * mp.sqrt(2 * n / x) * mp.besselk(1, 2 * mp.pi * mp.sqrt(2 * n * x))
            for n in range(1, terms))
        return 4 * mp.sinpi(x / 2) ** 2 * b


def test_f_plus_origin_is_exact_zero():
    ev = f_plus(0, P)
    assert ev.value == 0 and ev.err == 0 and ev.route is Route.Regularized


@pytest.mark.parametrize("r", ["1.5", "1.7", "2.3", "3.1", "4.4"])
def test_f_plus_routes_agree(r):
    a, b = f_plus(r, P), a_direct(r, P)
    assert abs(a.value - b.value) <= a.err + b.err


def test_a_direct_refuses_near_pole():
    with pytest.raises(ValueError):
        a_direct("1.4", P)


def test_forced_zeros():
    for k in range(1, 6):
        value, allowance = zero_check(f_plus, k, P)
        assert abs(value) <= allowance
    assert len(forced_zeros(5, P)) == 5


def test_exact_forced_zero_via_squared_radius():
    ev = f_plus(x=4)
    assert ev.value == 0 and ev.err == 0


def test_f_plus_sign_pattern():
    with mp.workdps(50):
        assert f_plus("1.3", P).value < 0
        assert f_plus("1.6", P).value > 0
        assert f_plus("3.1", P).value > 0


@pytest.mark.parametrize("r", ["0.3", "0.9", "1.7", "2.9", "4.6"])
def test_f_minus_routes_agree(r):
    a = f_minus(r, P, "ClosedSeries")
    b = f_minus(r, P, "Quadrature")
    assert abs(a.value - b.value) <= a.err + b.err


@pytest.mark.parametrize("r", ["1.1", "1.9", "3.3"])
def test_f_minus_matches_bessel_series(r):
    assert abs(f_minus(r, P).value - minus_by_bessel(r)) < mp.mpf("1e-35")


def test_f_minus_origin_behaviour():
    with mp.workdps(50):
        r = mp.mpf("0.02")
        assert abs(r * r * f_minus(r, P).value + 2 / mp.pi) < mp.mpf("1e-2")
    with pytest.raises(ValueError):
        f_minus(0, P)


def test_f_minus_sign_change_is_near_0_54():
    # f_minus is negative near the origin and turns nonnegative at r ~ 0.5427
    with mp.workdps(50):
        root = mp.findroot(lambda r: f_minus(r, P).value, mp.mpf("0.54"))
        assert abs(root - mp.mpf("0.542669210655")) < mp.mpf("1e-10")
        assert f_minus("1.2", P).value > 0
        assert f_minus(mp.sqrt(2), P).value == pytest.approx(0, abs=1e-30)


def test_hurwitz_zeta_against_polygamma():
    with mp.workdps(60):
        for s, a in [(3, "1.5"), (3, "13"), (5, "1"), (7, "40")]:
            a = mp.mpf(a)
            ref = (-1) ** s * mp.psi(s - 1, a) / mp.factorial(s - 1)
            assert abs(hurwitz_zeta(s, a) - ref) < mp.mpf("1e-55") * abs(ref)


def test_hurwitz_zeta_large_order():
    with mp.workdps(60):
        ref = mp.fsum(mp.mpf(k) ** -42 for k in range(106, 5000))
        assert abs(hurwitz_zeta(42, 106) - ref) < mp.mpf("1e-55") * ref


def test_sin2_over_pole_small_window():
    with mp.workdps(40):
        for d in ("1e-5", "-3e-4", "0.2"):
            d = mp.mpf(d)
            assert abs(sin2_over_pole(d) - mp.sinpi(d / 2) ** 2 / (mp.pi * d)) < mp.mpf("1e-35")
        assert sin2_over_pole(0) == 0


def test_envelopes_bound_the_functions():
    with mp.workdps(40):
        for r in ("1.6", "2.5", "4"):
            assert abs(f_plus(r, P).value) <= plus_envelope(r)
        for r in ("1", "1.8", "3"):
            assert abs(f_minus(r, P).value - minus_leading(r)) <= minus_remainder_bound(r)


def test_leading_transform_formula():
    with mp.workdps(30):
        assert minus_leading_transform(1) == pytest.approx(-2 / mp.pi)


def test_loose_tolerance_is_honoured():
    ev = f_plus("1.7", PrecisionCtx(30), tol=mp.mpf("1e-16"))
    assert ev.err <= mp.mpf("1e-16")
    assert abs(ev.value - f_plus("1.7", P).value) <= ev.err + mp.mpf("1e-30")


def test_eigenfunction_ids():
    assert EigenfunctionId.parse("plus") is EigenfunctionId.PlusD4
    assert EigenfunctionId.parse("-1").eigenvalue == -1
    with pytest.raises(ValueError):
        EigenfunctionId.parse("zero")
