import mpmath as mp
import pytest

from d4eigen.eigenfunctions import f_plus, minus_leading, minus_leading_transform
from d4eigen.precision import PrecisionCtx
from d4eigen.radial_fourier import (HandleError, HankelError, HankelQuadSpec, RadialFunctionHandle,
                                    eigen_residual, gaussian_handle, gaussian_mixture_handle,
                                    hankel4)

SPEC = HankelQuadSpec(tol=1e-12)


def gauss_transform(t, s):
    return t ** -2 * mp.exp(-mp.pi * s * s / t)


@pytest.mark.parametrize("s", ["0", "0.3", "1", "2.5"])
def test_gaussian_is_self_dual(s):
    v, err = hankel4(gaussian_handle(1), mp.mpf(s), SPEC)
    assert abs(v - mp.exp(-mp.pi * mp.mpf(s) ** 2)) < mp.mpf("1e-12")
    assert err <= mp.mpf("1e-12")


@pytest.mark.parametrize("t", ["0.5", "3"])
def test_scaled_gaussian(t):
    t = mp.mpf(t)
    for s in ("0.2", "1.1"):
        v, _ = hankel4(gaussian_handle(t), mp.mpf(s), SPEC)
        assert abs(v - gauss_transform(t, mp.mpf(s))) < mp.mpf("1e-12")


def test_linearity_on_mixtures():
    terms = [(2, 1), (-3, "0.5"), ("0.25", 4)]
    s = mp.mpf("0.8")
    v, _ = hankel4(gaussian_mixture_handle(terms), s, SPEC)
    want = sum(mp.mpf(c) * gauss_transform(mp.mpf(t), s) for c, t in terms)
    assert abs(v - want) < mp.mpf("1e-11")


def test_transform_is_an_involution_on_gaussians():
    # the transform of exp(-pi t r^2) is t^-2 exp(-pi r^2/t); transform again
    t = mp.mpf(2)
    h = gaussian_handle(1 / t, t ** -2)
    v, _ = hankel4(h, mp.mpf("0.7"), SPEC)
    assert abs(v - mp.exp(-mp.pi * t * mp.mpf("0.49"))) < mp.mpf("1e-12")


def test_block_budget_is_enforced():
    h = gaussian_handle("0.05")
    with pytest.raises(HankelError):
        hankel4(h, mp.mpf(3), HankelQuadSpec(tol=1e-6, zero_blocks=40))
    v, err = hankel4(h, mp.mpf(3), HankelQuadSpec(tol=1e-6))
    assert err <= mp.mpf("1e-6")
    assert abs(v - gauss_transform(mp.mpf("0.05"), mp.mpf(3))) < mp.mpf("1e-6")


def damped_h_transform(eps, s):
    # h e^{-pi eps x} = 2 int_0^oo [e^{-pi(u+eps)x} - Re e^{-pi(u+eps-i)x}] du, x = r^2,
    # and e^{-pi a x} transforms to a^-2 e^{-pi s^2/a} for Re a > 0
    def integrand(u):
        a, b = u + eps, mp.mpc(u + eps, -1)
        return a ** -2 * mp.exp(-mp.pi * s * s / a) - (b ** -2 * mp.exp(-mp.pi * s * s / b)).real
    return 2 * mp.quad(integrand, [0, 1, 10, mp.inf])


@pytest.mark.parametrize("s", ["0.6", "1.3"])
def test_damped_leading_part(s):
    eps = mp.mpf("0.1")
    damped = RadialFunctionHandle(
        name="h-damped",
        eval=lambda r: (minus_leading(r) * mp.exp(-mp.pi * eps * r * r), mp.mpf(0)),
        decay_bound=lambda r: 4 / (mp.pi * r * r) * mp.exp(-mp.pi * eps * r * r),
        decay_from=1.0,
    )
    s = mp.mpf(s)
    v, _ = hankel4(damped, s, HankelQuadSpec(tol=1e-9))
    with mp.workdps(30):
        assert abs(v - damped_h_transform(eps, s)) < mp.mpf("1e-8")


def test_leading_transform_is_the_undamped_limit():
    s = mp.mpf("1.3")
    with mp.workdps(30):
        assert abs(damped_h_transform(mp.mpf("1e-6"), s) - minus_leading_transform(s)) < mp.mpf("1e-4")


def test_origin_exponent_guard():
    with pytest.raises(HandleError):
        RadialFunctionHandle("bad", lambda r: (1 / r ** 4, 0), lambda r: 1 / r ** 4, origin_exponent=-4)


def test_plus_is_an_eigenfunction_at_sample_points():
    res = eigen_residual("plus", [mp.mpf("0.5"), mp.sqrt(2)], HankelQuadSpec(tol=1e-8))
    assert res.max_residual < mp.mpf("1e-8")
    # at sqrt(2) both sides vanish
    assert abs(res.rows[1][1]) < mp.mpf("1e-8")
    with mp.workdps(40):
        assert abs(f_plus(mp.sqrt(2), PrecisionCtx(30)).value) < mp.mpf("1e-25")


def test_minus_is_an_anti_eigenfunction_at_sample_points():
    res = eigen_residual("minus", [mp.mpf("0.75"), mp.mpf(2)], HankelQuadSpec(tol=1e-8))
    assert res.max_residual < mp.mpf("1e-8")


def test_minus_rejects_the_origin():
    with pytest.raises(ValueError):
        eigen_residual("minus", [0])
