import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d4eigen.bessel import bessel_j0, bessel_j1, j1_zero, j1_zeros
from d4eigen.precision import PrecisionCtx

P = PrecisionCtx(40)


@pytest.mark.parametrize("x", ["0.001", "0.7", "3.8", "17.25", "64", "250.5"])
def test_against_mpmath(x):
    with mp.workdps(60):
        xm = mp.mpf(x)
        assert abs(bessel_j1(xm, P) - mp.besselj(1, xm)) < mp.mpf("1e-40")
        assert abs(bessel_j0(xm, P) - mp.besselj(0, xm)) < mp.mpf("1e-40")


def test_values_at_zero():
    assert bessel_j1(0, P) == 0
    assert bessel_j0(0, P) == 1


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0, max_value=400, allow_nan=False))
def test_j1_is_bounded(x):
    assert abs(bessel_j1(mp.mpf(x), P)) <= mp.mpf("0.5819")  # max of J_1, near x = 1.841


def test_first_zero():
    with mp.workdps(40):
        assert abs(j1_zero(1, P) - mp.mpf("3.8317059702075123156")) < mp.mpf("1e-18")


def test_zeros_match_mpmath():
    zs = j1_zeros(12, P)
    with mp.workdps(50):
        for k, z in enumerate(zs, start=1):
            assert abs(z - mp.besseljzero(1, k)) < mp.mpf("1e-35")
    assert all(a < b for a, b in zip(zs, zs[1:]))
