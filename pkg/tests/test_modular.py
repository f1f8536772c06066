import mpmath as mp
import pytest

from d4eigen.modular import (CrossCheckError, EvaluationError, Law, ResidualReport, eval_form,
                             eval_g, eval_phi_imag_axis, random_points, theta_values,
                             transform_residual)
from d4eigen.precision import PrecisionCtx, UpperHalfPoint
from d4eigen.qseries import SeriesId

P = PrecisionCtx(40)


@pytest.mark.parametrize("law", list(Law))
def test_laws_hold_at_random_points(law):
    for p in random_points(3, seed=7):
        rep = transform_residual(law, p, P, tolerance=mp.mpf("1e-30"))
        assert rep.passed, rep.as_dict()


def test_random_points_are_reproducible():
    a = random_points(5, seed=11)
    b = random_points(5, seed=11)
    assert [str(p) for p in a] == [str(p) for p in b]
    assert all(-2 < p.x < 2 and mp.mpf("0.5") < p.y < 3 for p in a)


def test_theta_against_mpmath_jtheta():
    # mpmath's jtheta uses the nome q = e^{i pi z}, an independent implementation
    z = mp.mpc("0.3", "0.8")
    with mp.workdps(50):
        nome = mp.expjpi(z)
        ref = [mp.jtheta(2, 0, nome), mp.jtheta(3, 0, nome), mp.jtheta(4, 0, nome)]
        got = theta_values(z, P)
        for a, b in zip(got, ref):
            assert abs(a - b) < mp.mpf("1e-40")


def test_e2_at_i():
    with mp.workdps(60):
        assert abs(eval_form(SeriesId.E2, mp.mpc(0, 1), PrecisionCtx(50)).real - 3 / mp.pi) < mp.mpf("1e-45")


def test_delta_product_matches_eisenstein_combination():
    z = mp.mpc("-0.4", "1.1")
    with mp.workdps(50):
        a = eval_form(SeriesId.Delta, z, P)
        b = eval_form(SeriesId.DeltaEis, z, P)
        assert abs(a - b) < mp.mpf("1e-38") * abs(a)


def test_delta_positive_on_axis():
    for t in ("0.5", "1", "2.5"):
        v = eval_form(SeriesId.Delta, mp.mpc(0, t), P)
        assert v.real > 0 and abs(v.imag) < mp.mpf("1e-40") * v.real


def test_cusp_asymptotics():
    with mp.workdps(50):
        assert abs(eval_phi_imag_axis(5, P) * mp.exp(-10 * mp.pi) - 1) < mp.mpf("1e-6")
        assert abs(eval_phi_imag_axis("0.05", P) * mp.exp(20 * mp.pi) - 8192) < 1


def test_phi_axis_continuous_at_seam():
    with mp.workdps(50):
        below = eval_form(SeriesId.Psi, mp.mpc(0, 1), P).real
        above = eval_form(SeriesId.Phi, mp.mpc(0, 1), P).real
        assert abs(below - above) < mp.mpf("1e-38")


def test_g_equals_e2_of_inverse():
    for t in ("0.3", "1", "2.7"):
        with mp.workdps(50):
            t = mp.mpf(t)
            direct = -t * t * eval_form(SeriesId.E2, mp.mpc(0, t), P).real + 6 * t / mp.pi
            assert abs(eval_g(t, P) - direct) < mp.mpf("1e-35") * max(1, t * t)


def test_bad_points():
    with pytest.raises(ValueError):
        UpperHalfPoint(0, 0)
    with pytest.raises(EvaluationError):
        eval_g(0, P)
    with pytest.raises(EvaluationError):
        eval_phi_imag_axis(-1, P)


def test_report_dict():
    rep = transform_residual(Law.Period2, mp.mpc(0.1, 1), P)
    d = rep.as_dict()
    assert d["law"] == "Period2" and d["pass"] is True
    assert isinstance(rep, ResidualReport)


def test_precision_floor():
    with pytest.raises(ValueError):
        PrecisionCtx(20)
