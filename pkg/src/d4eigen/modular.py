"""Numeric evaluation of theta functions, Delta, Eisenstein series and phi.

All sums and products are truncated with explicit tail bounds; the working
precision is `prec.dps` plus a few guard digits.  Transformation laws are
checked by evaluating both sides independently at the transformed points.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import mpmath as mp

from .precision import DEFAULT_PREC, PrecisionCtx, UpperHalfPoint, to_mpf
from .qseries import SeriesError, SeriesId

__all__ = [
    "EvaluationError",
    "CrossCheckError",
    "Law",
    "ResidualReport",
    "eval_form",
    "eval_phi_imag_axis",
    "eval_g",
    "transform_residual",
    "random_points",
    "theta_values",
]

MAX_TERMS = 200_000
_GUARD = 5


class EvaluationError(ArithmeticError):
    pass


class CrossCheckError(EvaluationError):
    """Two algebraically equivalent evaluation routes disagreed."""


def _as_z(z):
    if isinstance(z, UpperHalfPoint):
        return z.z
    z = mp.mpc(z)
    if not z.imag > 0:
        raise EvaluationError(f"Im z must be positive, got {z}")
    return z


def _theta_sums(z, tol):
    """(Theta2, Theta3, Theta4) by lacunary summation.

    Tail after the last kept term n is bounded by 2|q|^((n+1)^2/2) / (1-|q|).
    """
    y = z.imag
    qa = mp.exp(-2 * mp.pi * y)
    denom = 1 - qa
    # Theta3/Theta4: Q = e^{i pi z}, terms Q^{n^2}
    Q = mp.expjpi(z)
    s3 = mp.mpc(0)
    s4 = mp.mpc(0)
    term = mp.mpc(1)
    step = Q  # Q^{2n+1} for n = 0
    Q2 = Q * Q
    n = 0
    while True:
        n += 1
        term *= step  # Q^{n^2}
        step *= Q2
        s3 += term
        s4 += -term if n % 2 else term
        if 2 * mp.exp(-mp.pi * y * (n + 1) ** 2) / denom < tol:
            break
        if n > MAX_TERMS:
            raise EvaluationError("theta tail cannot be certified at this precision")
    t3 = 1 + 2 * s3
    t4 = 1 + 2 * s4
    # Theta2: 2 sum_{a>=0} e^{i pi z (a+1/2)^2}
    s2 = mp.mpc(0)
    a = 0
    while True:
        s2 += mp.expjpi(z * (a + mp.mpf(0.5)) ** 2)
        a += 1
        if 2 * mp.exp(-mp.pi * y * (a + mp.mpf(0.5)) ** 2) / denom < tol:
            break
        if a > MAX_TERMS:
            raise EvaluationError("theta tail cannot be certified at this precision")
    return 2 * s2, t3, t4


def _delta_product(z, tol):
    """q prod (1-q^n)^24 with a multiplicative tail bound."""
    q = mp.expjpi(2 * z)
    qa = abs(q)
    denom = (1 - qa) ** 2
    prod = mp.mpc(1)
    qn = mp.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        prod *= 1 - qn
        # |prod_{m>n} (1-q^m)^24 - 1| <= exp(24 |q|^{n+1} / (1-|q|)^2) - 1
        bound = mp.expm1(24 * qa ** (n + 1) / denom)
        if bound < tol:
            break
        if n > MAX_TERMS:
            raise EvaluationError("Delta tail cannot be certified at this precision")
    return q * prod ** 24


def _eisenstein(weight, z, tol):
    """E_k = 1 + c_k sum n^{k-1} q^n / (1 - q^n) (Lambert form)."""
    scale = {2: -24, 4: 240, 6: -504}[weight]
    q = mp.expjpi(2 * z)
    qa = abs(q)
    s = mp.mpc(0)
    qn = mp.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        s += mp.mpf(n) ** (weight - 1) * qn / (1 - qn)
        m = n + 1
        ratio = (mp.mpf(m + 1) / m) ** (weight - 1) * qa
        if ratio < 1:
            first = mp.mpf(m) ** (weight - 1) * qa ** m / (1 - qa)
            if abs(scale) * first / (1 - ratio) < tol:
                break
        if n > MAX_TERMS:
            raise EvaluationError("Eisenstein tail cannot be certified at this precision")
    return 1 + scale * s


def theta_values(z, prec: PrecisionCtx = DEFAULT_PREC):
    """(Theta2, Theta3, Theta4) at z."""
    z = _as_z(z)
    with mp.workdps(prec.dps + _GUARD):
        return _theta_sums(mp.mpc(z), prec.tail_tol)


def eval_form(sid, z, prec: PrecisionCtx = DEFAULT_PREC):
    """Value of a named form at a point of the upper half-plane (mpc)."""
    sid = SeriesId.parse(sid)
    z = _as_z(z)
    tol = prec.tail_tol
    extra = _GUARD
    if sid is SeriesId.DeltaEis:
        # E4^3 - E6^2 cancels down to size |q|
        extra += int(mp.ceil(2 * mp.pi * z.imag / mp.log(10)))
    with mp.workdps(prec.dps + extra):
        z = mp.mpc(z)
        if sid in (SeriesId.Theta2, SeriesId.Theta3, SeriesId.Theta4):
            t2, t3, t4 = _theta_sums(z, tol)
            val = {SeriesId.Theta2: t2, SeriesId.Theta3: t3, SeriesId.Theta4: t4}[sid]
        elif sid is SeriesId.Delta:
            val = _delta_product(z, tol)
        elif sid is SeriesId.E2:
            val = _eisenstein(2, z, tol)
        elif sid is SeriesId.E4:
            val = _eisenstein(4, z, tol)
        elif sid is SeriesId.E6:
            val = _eisenstein(6, z, tol)
        elif sid is SeriesId.DeltaEis:
            tol2 = tol * abs(mp.expjpi(2 * z))
            val = (_eisenstein(4, z, tol2) ** 3 - _eisenstein(6, z, tol2) ** 2) / 1728
        elif sid is SeriesId.D4Theta:
            _, t3, t4 = _theta_sums(z, tol)
            val = (t3 ** 4 + t4 ** 4) / 2
        else:
            t2, t3, t4 = _theta_sums(z, tol)
            d = _delta_product(z, tol)
            a, b, c = t2 ** 12, t3 ** 12, t4 ** 12
            if sid is SeriesId.Phi:
                val = c * (b + a) / d
            elif sid is SeriesId.Psi:
                val = a * (b + c) / d
            elif sid is SeriesId.PhiT:
                val = b * (c - a) / d
            else:  # pragma: no cover
                raise SeriesError(f"no evaluator for {sid}")
    return +val


def eval_phi_imag_axis(t, prec: PrecisionCtx = DEFAULT_PREC):
    """phi(it) as a real number.

    For t >= 1 phi is evaluated directly; below the seam it is psi(i/t),
    psi(w) = phi(-1/w), whose q-expansion converges fast there.
    """
    t = to_mpf(t)
    if not t > 0:
        raise EvaluationError(f"t must be positive, got {t}")
    with mp.workdps(prec.dps + _GUARD):
        if t >= 1:
            v = eval_form(SeriesId.Phi, mp.mpc(0, t), prec)
        else:
            v = eval_form(SeriesId.Psi, mp.mpc(0, 1 / t), prec)
        return +v.real


def eval_g(t, prec: PrecisionCtx = DEFAULT_PREC, check: bool = True):
    """g(t) = -t^2 E2(it) + 6t/pi, which equals E2(i/t).

    The route is picked by t (direct above 1, E2(i/t) below).  Where both
    routes are cheap (1/4 <= t <= 4) the other one is computed as well and
    any disagreement raises CrossCheckError.
    """
    t = to_mpf(t)
    if not t > 0:
        raise EvaluationError(f"t must be positive, got {t}")
    with mp.workdps(prec.dps + _GUARD):
        def direct():
            return (-t * t * eval_form(SeriesId.E2, mp.mpc(0, t), prec).real
                    + 6 * t / mp.pi)

        def flipped():
            return eval_form(SeriesId.E2, mp.mpc(0, 1 / t), prec).real

        v = direct() if t >= 1 else flipped()
        if check and mp.mpf(1) / 4 <= t <= 4:
            w = flipped() if t >= 1 else direct()
            scale = max(1, abs(v), t * t)
            if abs(v - w) > scale * mp.mpf(10) ** (-prec.digits):
                raise CrossCheckError(f"g({t}) routes disagree: {v} vs {w}")
        return +v


# ---------------------------------------------------------------------------
# transformation laws


class Law(enum.Enum):
    ThetaS2 = "ThetaS2"
    ThetaS3 = "ThetaS3"
    ThetaS4 = "ThetaS4"
    ThetaT2 = "ThetaT2"
    ThetaT3 = "ThetaT3"
    ThetaT4 = "ThetaT4"
    E2S = "E2S"
    FuncEq1 = "FuncEq1"
    FuncEq2 = "FuncEq2"
    QuasiMod5 = "QuasiMod5"
    Gamma2Inv = "Gamma2Inv"
    Period2 = "Period2"

    @classmethod
    def parse(cls, tag) -> "Law":
        if isinstance(tag, cls):
            return tag
        for m in cls:
            if m.value.lower() == str(tag).lower():
                return m
        raise ValueError(f"unknown law {tag!r}")


@dataclass(frozen=True)
class ResidualReport:
    law: Law
    point: UpperHalfPoint
    residual_abs: object
    tolerance: object

    @property
    def passed(self) -> bool:
        return self.residual_abs <= self.tolerance

    def as_dict(self):
        return {
            "law": self.law.value,
            "x": mp.nstr(self.point.x, 20),
            "y": mp.nstr(self.point.y, 20),
            "residual": mp.nstr(self.residual_abs, 6),
            "tolerance": mp.nstr(self.tolerance, 6),
            "pass": self.passed,
        }


def _sqrt_minus_iz(z):
    w = -1j * z
    # principal branch is fine: Re(-iz) = Im z > 0
    assert w.real > 0
    return mp.sqrt(w)


def _law_sides(law: Law, z, prec):
    ev = lambda sid, w: eval_form(sid, w, prec)  # noqa: E731
    if law in (Law.ThetaS2, Law.ThetaS3, Law.ThetaS4):
        lhs = theta_values(-1 / z, prec)
        rhs = theta_values(z, prec)
        root = _sqrt_minus_iz(z)
        i = {Law.ThetaS2: (0, 2), Law.ThetaS3: (1, 1), Law.ThetaS4: (2, 0)}[law]
        return lhs[i[0]], root * rhs[i[1]]
    if law in (Law.ThetaT2, Law.ThetaT3, Law.ThetaT4):
        lhs = theta_values(z + 1, prec)
        rhs = theta_values(z, prec)
        if law is Law.ThetaT2:
            return lhs[0], mp.expjpi(mp.mpf(1) / 4) * rhs[0]
        if law is Law.ThetaT3:
            return lhs[1], rhs[2]
        return lhs[2], rhs[1]
    if law is Law.E2S:
        return ev(SeriesId.E2, -1 / z), z * z * ev(SeriesId.E2, z) + 6 * z / (mp.pi * 1j)
    if law is Law.FuncEq1:
        # i^{-2} z^0 = -1 for d = 4
        return ev(SeriesId.Phi, z + 1) - ev(SeriesId.Phi, z), -ev(SeriesId.Phi, -1 / z)
    if law is Law.FuncEq2:
        return ev(SeriesId.Phi, z + 1), -ev(SeriesId.Phi, -1 / z + 1)
    if law is Law.QuasiMod5:
        lhs = (ev(SeriesId.E2, -1 / (z - 1)) + ev(SeriesId.E2, -1 / (z + 1))
               - 2 * ev(SeriesId.E2, -1 / z))
        return lhs, 2 * ev(SeriesId.E2, z)
    if law is Law.Gamma2Inv:
        return ev(SeriesId.Phi, z / (2 * z + 1)), ev(SeriesId.Phi, z)
    if law is Law.Period2:
        return ev(SeriesId.Phi, z + 2), ev(SeriesId.Phi, z)
    raise ValueError(law)  # pragma: no cover


def transform_residual(law, z, prec: PrecisionCtx = DEFAULT_PREC,
                       tolerance=None) -> ResidualReport:
    """|LHS - RHS| of a transformation law at z (default tolerance 10^-(digits/2))."""
    law = Law.parse(law)
    point = UpperHalfPoint.of(z)
    with mp.workdps(prec.dps + _GUARD):
        zz = point.z
        if law is Law.Gamma2Inv and not (zz / (2 * zz + 1)).imag > 0:
            raise EvaluationError(f"z/(2z+1) leaves the upper half-plane at {point}")
        lhs, rhs = _law_sides(law, zz, prec)
        res = abs(lhs - rhs)
    if tolerance is None:
        tolerance = mp.mpf(10) ** (-(prec.digits // 2))
    return ResidualReport(law, point, +res, to_mpf(tolerance))


def random_points(k: int, seed: int, x_range=(-2, 2), y_range=(0.5, 3)):
    """Reproducible sample of points with |Re z| < 2 and 0.5 < Im z < 3."""
    rng = random.Random(seed)
    pts = []
    for _ in range(k):
        x = rng.uniform(*x_range)
        y = rng.uniform(*y_range)
        pts.append(UpperHalfPoint(x, y))
    return pts
