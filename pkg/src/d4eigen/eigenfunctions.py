"""The radial eigenfunctions f_plus (eigenvalue +1) and f_minus (-1) on R^4.

Both have the shape

    f(r) = 4 sin^2(pi r^2 / 2) * int_0^oo w(t) exp(-pi r^2 t) dt

with weight w(t) = phi(it) for f_plus and g(t) = -t^2 E2(it) + 6t/pi for
f_minus.  Each is computed by two independent routes so the values can be
checked against each other.

f_plus, regularized (valid for every r >= 0)::

    f_plus(r) = 4 sin^2(pi x/2) [ 1/(pi(x-2)) - 24/(pi x)
                                  + int_0^oo (phi(it) - e^{2 pi t} + 24) e^{-pi x t} dt ]

with x = r^2.  The integral is split at t = 1; above it the q-expansion of
phi is integrated term by term, below it psi(i/t) = phi(it) is integrated
numerically.  `a_direct` integrates phi(it) exp(-pi x t) over (0, oo) as is,
using the theta/Delta evaluator, and needs x > 2.

f_minus := i*b is normalized so that it is >= 0 for large r.  It behaves
like -2/(pi r^2) at the origin and like 4 sin^2(pi r^2/2)/(pi r^2) at
infinity, so it is not a Schwartz function; it is only evaluated for r > 0.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .modular import eval_g, eval_phi_imag_axis
from .precision import DEFAULT_PREC, PrecisionCtx, to_mpf
from .qseries import DEFAULT_ORDER, SeriesId, build_series, laplace_terms
from .quadrature import QuadratureError, TanhSinh01

__all__ = [
    "EigenfunctionId",
    "Route",
    "EigenEval",
    "PrecisionError",
    "f_plus",
    "a_direct",
    "f_minus",
    "forced_zeros",
    "zero_check",
    "plus_envelope",
    "minus_leading",
    "minus_leading_transform",
    "minus_remainder_bound",
    "sin2_over_pole",
    "coefficient_envelope",
]

_GUARD = 10
# small-argument window for sin^2(pi d/2)/(pi d)
_POLE_WINDOW = mp.mpf("1e-3")
# phi and psi coefficients grow like exp(2 sqrt(2) pi sqrt(m)) at q^(m/2)
GROWTH_RATE = 2 * mp.sqrt(2) * mp.pi


class PrecisionError(ArithmeticError):
    """Error estimate still above the requested tolerance."""


class EigenfunctionId(enum.Enum):
    PlusD4 = 1
    MinusD4 = -1

    @property
    def eigenvalue(self) -> int:
        return self.value

    @classmethod
    def parse(cls, tag) -> "EigenfunctionId":
        if isinstance(tag, cls):
            return tag
        key = str(tag).lower()
        if key in ("plus", "plusd4", "+", "+1", "1"):
            return cls.PlusD4
        if key in ("minus", "minusd4", "-", "-1"):
            return cls.MinusD4
        raise ValueError(f"unknown eigenfunction {tag!r}")


class Route(enum.Enum):
    Regularized = "Regularized"
    Direct = "Direct"
    ClosedSeries = "ClosedSeries"
    Quadrature = "Quadrature"


@dataclass(frozen=True)
class EigenEval:
    r: object
    value: object
    err: object
    route: Route

    def as_dict(self, digits: int = 30):
        return {
            "r": mp.nstr(self.r, digits),
            "value": mp.nstr(self.value, digits),
            "err": mp.nstr(self.err, 3),
            "route": self.route.value,
        }


# ---------------------------------------------------------------------------
# helpers


def _sinc(y):
    """sin(y)/y, by its Taylor series when y is small."""
    if abs(y) > mp.mpf("0.01"):
        return mp.sin(y) / y
    y2 = y * y
    term = mp.mpf(1)
    s = mp.mpf(1)
    k = 0
    eps = mp.eps
    while abs(term) > eps:
        k += 1
        term *= -y2 / ((2 * k) * (2 * k + 1))
        s += term
    return s


def sin2_over_pole(d):
    """sin^2(pi d/2) / (pi d), continuous through d = 0 (where it vanishes).

    sin^2(pi x/2) = sin^2(pi (x - c)/2) for even c, so this is the product of
    the root-forcing factor with the pole 1/(pi(x - c)).
    """
    if d == 0:
        return mp.mpf(0)
    if abs(d) < _POLE_WINDOW:
        y = mp.pi * d / 2
        return y * _sinc(y) ** 2 / 2
    return mp.sinpi(d / 2) ** 2 / (mp.pi * d)


def _expm1_over(a):
    """(e^a - 1)/a = int_0^1 e^{a t} dt."""
    if a == 0:
        return mp.mpf(1)
    return mp.expm1(a) / a


def _squared(r, x):
    if x is not None:
        x = to_mpf(x)
        return mp.sqrt(x), x
    r = to_mpf(r)
    return r, r * r


def coefficient_envelope(terms):
    """Constant K with |w_m| <= K exp(GROWTH_RATE sqrt(m)) on the computed range."""
    k = mp.mpf(0)
    for m, w in terms:
        if m > 0:
            k = max(k, abs(mp.mpf(w)) * mp.exp(-GROWTH_RATE * mp.sqrt(m)))
    return 2 * k


def _tail_envelope(K, m_last, rate):
    """Bound on sum_{m > m_last} K exp(B sqrt(m) - rate m) (integer steps)."""
    m = m_last + 1
    ratio = mp.exp(GROWTH_RATE / (2 * mp.sqrt(m)) - rate)
    if ratio >= 1:
        return mp.inf
    return K * mp.exp(GROWTH_RATE * mp.sqrt(m) - rate * m) / (1 - ratio)


# ---------------------------------------------------------------------------
# f_plus, regularized route


class _PlusData:
    """Per-precision state: phi coefficients and the cached (0,1] rule."""

    def __init__(self, dps: int, order: int):
        self.dps = dps
        with mp.workdps(dps):
            phi = [(int(m), int(w)) for m, w in laplace_terms(build_series(SeriesId.Phi, order))]
            psi = [(int(m), int(w)) for m, w in laplace_terms(build_series(SeriesId.Psi, order))]
            self.phi_tail = [(m, mp.mpf(w)) for m, w in phi if m >= 1]
            self.phi_last = order // 4
            self.phi_K = coefficient_envelope(phi)
            self.psi = [(m, mp.mpf(w)) for m, w in psi]
            self.psi_last = order // 4
            self.psi_K = coefficient_envelope(psi)
            self.tol = mp.mpf(10) ** (-dps)
        self.rule = TanhSinh01(self._psi_at, dps)

    def _psi_at(self, t):
        # phi(it) = psi(i/t) = sum w exp(-pi m / t)
        s = 1 / t
        if mp.pi * s > 2 * self.dps * mp.log(10):
            return mp.mpf(0)
        total = mp.fsum(w * mp.exp(-mp.pi * m * s) for m, w in self.psi)
        return total


@lru_cache(maxsize=8)
def _plus_data(dps: int, order: int) -> _PlusData:
    return _PlusData(dps, order)


def f_plus(r=None, prec: PrecisionCtx = DEFAULT_PREC, *, x=None, tol=None,
           order: int = DEFAULT_ORDER) -> EigenEval:
    """f_plus at radius r (or squared radius x), valid for all r >= 0."""
    data = _plus_data(prec.dps + _GUARD, order)
    with mp.workdps(prec.dps + _GUARD):
        r, x = _squared(r, x)
        if x < 0:
            raise ValueError(f"radius must be non-negative, got {r}")
        if tol is None:
            tol = prec.tail_tol
        tol = to_mpf(tol)
        s2 = mp.sinpi(x / 2) ** 2
        # poles 1/(pi(x-2)) and -24/(pi x), each cancelled by sin^2
        pole = 4 * sin2_over_pole(x - 2) - 96 * sin2_over_pole(x)
        if s2 == 0:
            return EigenEval(r, +pole, mp.mpf(0), Route.Regularized)
        # int_0^1 (-e^{2 pi t} + 24) e^{-pi x t} dt
        elem = -_expm1_over(mp.pi * (2 - x)) + 24 * _expm1_over(-mp.pi * x)
        # int_1^oo (phi(it) - e^{2 pi t} + 24) e^{-pi x t} dt, termwise
        upper = mp.fsum(w * mp.exp(-mp.pi * (m + x)) / (mp.pi * (m + x))
                        for m, w in data.phi_tail)
        upper_err = _tail_envelope(data.phi_K, data.phi_last, mp.pi) * mp.exp(-mp.pi * x) / mp.pi
        # int_0^1 phi(it) e^{-pi x t} dt with phi(it) = psi(i/t)
        quad_tol = tol / (4 * s2) if s2 > 0 else tol
        try:
            lower, lower_err = data.rule.integrate(lambda t: mp.exp(-mp.pi * x * t),
                                                   max(quad_tol, data.tol))
        except QuadratureError as exc:
            raise PrecisionError(str(exc)) from exc
        inner = elem + upper + lower
        value = pole + 4 * s2 * inner
        rounding = mp.mpf(10) ** (-prec.dps) * (abs(pole) + 4 * s2 * (abs(elem) + abs(upper) + abs(lower)))
        psi_tail = _tail_envelope(data.psi_K, data.psi_last, mp.pi)
        err = 4 * s2 * (lower_err + upper_err + psi_tail) + rounding
        if err > max(tol, mp.mpf(10) ** (-prec.digits)):
            raise PrecisionError(f"f_plus({mp.nstr(r, 10)}): err {mp.nstr(err, 3)}")
        return EigenEval(r, +value, +err, Route.Regularized)


# ---------------------------------------------------------------------------
# a_direct: unregularized integral, theta/Delta evaluator


@lru_cache(maxsize=200_000)
def _phi_axis_cached(t, digits, margin):
    return eval_phi_imag_axis(t, PrecisionCtx(digits, margin))


def a_direct(r=None, prec: PrecisionCtx = DEFAULT_PREC, *, x=None) -> EigenEval:
    """i*a(r) from the unregularized Laplace integral (needs r^2 > 2)."""
    dps = prec.dps + _GUARD
    with mp.workdps(dps):
        r, x = _squared(r, x)
        if not x > 2 + mp.mpf("1e-6"):
            raise ValueError(f"a_direct needs r^2 > 2 + 1e-6, got r = {mp.nstr(r, 12)}")
        gap = mp.pi * (x - 2)
        # |phi(it)| <= 2 e^{2 pi t} for t >= 1, so the tail past T is
        # at most 2 e^{-gap T} / gap
        target = mp.mpf(10) ** (-dps)
        T = mp.mpf(2)
        while 2 * mp.exp(-gap * T) / gap > target:
            T *= 2
        tail = 2 * mp.exp(-gap * T) / gap
        points = [mp.mpf(0), mp.mpf(1)]
        p = mp.mpf(2)
        while p <= T:
            points.append(p)
            p *= 2

        def integrand(t):
            if t == 0:
                return mp.mpf(0)
            return _phi_axis_cached(t, prec.digits + _GUARD, prec.tail_margin) * mp.exp(-mp.pi * x * t)

        val, qerr = mp.quad(integrand, points, error=True)
        s2 = mp.sinpi(x / 2) ** 2
        value = 4 * s2 * val
        err = 4 * s2 * (qerr + tail) + mp.mpf(10) ** (-prec.dps) * abs(value)
        return EigenEval(r, +value, +err, Route.Direct)


# ---------------------------------------------------------------------------
# f_minus


@lru_cache(maxsize=None)
def _zeta_const(s, dps):
    with mp.workdps(dps):
        return mp.zeta(s)


def hurwitz_zeta(s: int, a, tol=None):
    """zeta(s, a) = sum_{k>=0} (a+k)^-s for integer s >= 2 and real a > 0.

    Euler-Maclaurin at b = a + M.  The derivatives of (b+k)^-s alternate in
    sign, so the remainder is bounded by the first omitted correction.  (mpmath's own Hurwitz zeta loses
    accuracy when s and a are both large, e.g. zeta(42, 106).)
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    a = mp.mpf(a)
    if not a > 0:
        raise ValueError("a must be positive")
    if tol is None:
        tol = mp.eps
    # the corrections shrink like (s+2i)^2 / (2 pi b)^2 until i ~ pi b, so the
    # smallest one is about e^(-2 pi b); b >= 0.4 dps + s/2 puts it below eps
    M = max(0, int(mp.ceil(mp.mpf(s) / 2 + mp.mpf(0.4) * mp.mp.dps + 2 - a)))
    b = a + M
    head = mp.fsum((a + k) ** (-s) for k in range(M))
    total = head + b ** (1 - s) / (s - 1) + b ** (-s) / 2
    coeffs = _bernoulli_coeffs(mp.mp.prec)
    rise = mp.mpf(s)  # (s)_{2i-1}
    bp = b ** (-s - 1)
    b2 = b * b
    term = coeffs[0] * rise * bp
    for i in range(1, len(coeffs)):
        total += term
        rise *= (s + 2 * i - 1) * (s + 2 * i)
        bp /= b2
        nxt = coeffs[i] * rise * bp
        if abs(nxt) <= tol * abs(total):
            return total
        if abs(nxt) > abs(term):
            break
        term = nxt
    raise PrecisionError(f"Euler-Maclaurin diverged for zeta({s}, {mp.nstr(a, 8)})")


@lru_cache(maxsize=8)
def _bernoulli_coeffs(prec_bits: int, count: int = 400):
    """B_{2i} / (2i)! for i = 1..count."""
    with mp.workprec(prec_bits):
        return tuple(mp.bernoulli(2 * i) / mp.factorial(2 * i) for i in range(1, count + 1))


def _sigma_series_closed(x, tol):
    """S(x) = sum_{n>=1} 48 sigma_1(n) / (pi^3 (2n + x)^3), resummed exactly.

    Grouping n = d*m gives S = (6/pi^3) sum_d d^-2 zeta(3, 1 + x/(2d)).
    Divisors d <= D are summed directly; for d > D the Hurwitz zeta is
    expanded in c = x/2 and the d-sum collapses to zeta(2+j, D+1).
    """
    c = x / 2
    D = int(mp.ceil(8 * c)) + 8
    head = mp.fsum(hurwitz_zeta(3, 1 + c / d) / (d * d) for d in range(1, D + 1))
    zeta3 = _zeta_const(3, mp.mp.dps)
    tail = mp.mpf(0)
    cp = mp.mpf(1)  # c^j
    j = 0
    err = mp.inf
    while True:
        binom = (j + 1) * (j + 2) // 2
        term = binom * _zeta_const(3 + j, mp.mp.dps) * cp * hurwitz_zeta(2 + j, D + 1)
        tail += term if j % 2 == 0 else -term
        j += 1
        cp *= c
        # next term bound: zeta(3+j) <= zeta(3), zeta(2+j, D+1) <= (D+1)^-(1+j) (1/(1+j) + 1/(D+1))
        nb = ((j + 1) * (j + 2) // 2) * zeta3 * cp * (mp.mpf(D + 1) ** (-(1 + j))) * (mp.mpf(1) / (1 + j) + mp.mpf(1) / (D + 1))
        rho = c / (D + 1) * mp.mpf(j + 3) / (j + 1)
        if rho < 1:
            err = nb / (1 - rho)
            if err < tol:
                break
        if j > 10_000:  # pragma: no cover
            raise PrecisionError("closed series tail did not converge")
    scale = 6 / mp.pi ** 3
    return scale * (head + tail), scale * err


def _sigma1(n):
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d
            if d * d != n:
                s += n // d
        d += 1
    return s


def _upper_laplace(x, tol):
    """int_1^oo g(t) e^{-pi x t} dt with g(t) = -t^2 + 6t/pi + 24 t^2 sum sigma_1(n) e^{-2 pi n t}."""

    def t2(a):  # int_1^oo t^2 e^{-at} dt
        return mp.exp(-a) * (a * a + 2 * a + 2) / a ** 3

    def t1(a):  # int_1^oo t e^{-at} dt
        return mp.exp(-a) * (a + 1) / a ** 2

    a0 = mp.pi * x
    total = -t2(a0) + 6 / mp.pi * t1(a0)
    n = 0
    while True:
        n += 1
        an = mp.pi * (x + 2 * n)
        term = 24 * _sigma1(n) * t2(an)
        total += term
        # sigma_1(m) <= m^2 and t2 decreases, ratio per step <= ((m+1)/m)^2 e^{-2 pi}
        m = n + 1
        nb = 24 * m * m * t2(mp.pi * (x + 2 * m))
        rho = (mp.mpf(m + 1) / m) ** 2 * mp.exp(-2 * mp.pi)
        bound = nb / (1 - rho)
        if bound < tol:
            return total, bound


class _MinusData:
    def __init__(self, digits: int, margin: int):
        self.prec = PrecisionCtx(digits, margin)
        self.dps = self.prec.dps + _GUARD
        self.rule = TanhSinh01(self._g_at, self.dps)

    def _g_at(self, t):
        return eval_g(t, self.prec)


@lru_cache(maxsize=8)
def _minus_data(digits: int, margin: int) -> _MinusData:
    return _MinusData(digits, margin)


def f_minus(r=None, prec: PrecisionCtx = DEFAULT_PREC, route="ClosedSeries", *,
            x=None, tol=None) -> EigenEval:
    """f_minus = i*b at r > 0.

    ClosedSeries: 4 sin^2(pi x/2) [-2/(pi^3 x^3) + 6/(pi^3 x^2) + S(x)].
    Quadrature:   4 sin^2(pi x/2) int_0^oo g(t) e^{-pi x t} dt, with (0,1]
                  integrated numerically from g = E2(i/t) and [1,oo) termwise.
    """
    route = Route(route) if not isinstance(route, Route) else route
    if route not in (Route.ClosedSeries, Route.Quadrature):
        raise ValueError(f"f_minus has no route {route}")
    dps = prec.dps + _GUARD
    with mp.workdps(dps):
        r, x = _squared(r, x)
        if not x > 0:
            raise ValueError("f_minus is only defined for r > 0 (it behaves like -2/(pi r^2) at 0)")
        tol = prec.tail_tol if tol is None else to_mpf(tol)
        s2 = mp.sinpi(x / 2) ** 2
        if s2 == 0:
            return EigenEval(r, mp.mpf(0), mp.mpf(0), route)
        if route is Route.ClosedSeries:
            pi3 = mp.pi ** 3
            S, serr = _sigma_series_closed(x, tol / (8 * s2))
            inner = -2 / (pi3 * x ** 3) + 6 / (pi3 * x ** 2) + S
            err = 4 * s2 * serr
        else:
            data = _minus_data(prec.digits, prec.tail_margin)
            up, uerr = _upper_laplace(x, tol / (8 * s2))
            try:
                low, lerr = data.rule.integrate(lambda t: mp.exp(-mp.pi * x * t),
                                                max(tol / (8 * s2), mp.mpf(10) ** (-dps)))
            except QuadratureError as exc:
                raise PrecisionError(str(exc)) from exc
            inner = up + low
            err = 4 * s2 * (uerr + lerr)
        value = 4 * s2 * inner
        err += mp.mpf(10) ** (-prec.dps) * max(abs(value), 4 * s2 / (mp.pi ** 3 * x ** 3))
        return EigenEval(r, +value, +err, route)


def forced_zeros(kmax: int, prec: PrecisionCtx = DEFAULT_PREC):
    """Radii sqrt(2k), k = 1..kmax, where sin^2(pi r^2/2) has a double zero."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    with mp.workdps(prec.dps):
        return [mp.sqrt(2 * k) for k in range(1, kmax + 1)]


def zero_check(f, k: int, prec: PrecisionCtx = DEFAULT_PREC):
    """(value, allowance) for f at the rounded radius sqrt(2k).

    The allowance is f's own err plus |f'| times the rounding of sqrt(2k),
    with f' taken from a symmetric difference; at sqrt(2) f_plus has a simple
    zero, so the rounding of the radius shows up in the value.
    """
    with mp.workdps(prec.dps):
        r = mp.sqrt(2 * k)
        ev = f(r, prec)
        h = mp.mpf(10) ** (-(prec.dps // 3))
        slope = abs(f(r + h, prec).value - f(r - h, prec).value) / (2 * h)
        rounding = r * mp.mpf(2) ** (-mp.mp.prec)
        return ev.value, ev.err + 2 * slope * rounding


# ---------------------------------------------------------------------------
# decay envelopes


@lru_cache(maxsize=4)
def _plus_envelope_constants(order: int = DEFAULT_ORDER):
    """(K_psi, K_phi) with |psi(iT)| <= K_psi e^{-pi T} and |phi(it)| <= K_phi e^{2 pi t}
    for T, t >= 1, read off the coefficients at T = t = 1 plus the growth tail."""
    with mp.workdps(40):
        out = []
        for sid, lead in ((SeriesId.Psi, 1), (SeriesId.Phi, -2)):
            terms = [(int(m), int(w)) for m, w in laplace_terms(build_series(sid, order))]
            K = mp.fsum(abs(w) * mp.exp(-mp.pi * (m - lead)) for m, w in terms)
            tail = _tail_envelope(coefficient_envelope(terms), order // 4, mp.pi)
            out.append(K + tail * mp.exp(mp.pi * lead))
        return tuple(out)


def plus_envelope(r):
    """Bound on |f_plus(r)| for r > sqrt(2).

    For x = r^2 > 2, f_plus = 4 sin^2(pi x/2) int_0^oo phi(it) e^{-pi x t} dt.
    On (0, 1], |phi(it)| <= K_psi e^{-pi/t} and pi/t + pi x t >= 2 pi r; on
    [1, oo), |phi(it)| <= K_phi e^{2 pi t}.
    """
    k_psi, k_phi = _plus_envelope_constants()
    r = to_mpf(r)
    x = r * r
    if not x > 2:
        raise ValueError("plus_envelope needs r > sqrt(2)")
    return 4 * (k_psi * mp.exp(-2 * mp.pi * r)
                + k_phi * mp.exp(-mp.pi * (x - 2)) / (mp.pi * (x - 2)))


def minus_leading(r):
    """h(r) = 4 sin^2(pi r^2/2) / (pi r^2), the non-decaying part of f_minus."""
    r = to_mpf(r)
    x = r * r
    return 4 * mp.sinpi(x / 2) ** 2 / (mp.pi * x)


def minus_leading_transform(s):
    """Fourier transform on R^4 of h: 2 cos(pi s^2) / (pi s^2)."""
    s = to_mpf(s)
    return 2 * mp.cospi(s * s) / (mp.pi * s * s)


def minus_remainder_bound(r):
    """Bound on |f_minus(r) - h(r)| for r >= 1.

    f_minus - h = -4 sin^2(pi x/2) * 48 sum sigma_1(n) sqrt(2n/x) K_1(2 pi sqrt(2 n x)),
    with K_1(z) <= sqrt(pi/(2z)) e^{-z} (1 + 3/(8z)) for real z > 0 and
    sigma_1(n) <= n (1 + log n).
    """
    r = to_mpf(r)
    if r < 1:
        raise ValueError("minus_remainder_bound needs r >= 1")
    x = r * r
    total = mp.mpf(0)
    n = 0
    while True:
        n += 1
        z = 2 * mp.pi * mp.sqrt(2 * n * x)
        term = (n * (1 + mp.log(n)) * mp.sqrt(2 * n / x)
                * mp.sqrt(mp.pi / (2 * z)) * mp.exp(-z) * (1 + 3 / (8 * z)))
        total += term
        if term < mp.eps * total:
            c = z / mp.sqrt(n)
            # sum_{m>n} of a term decaying like m^(5/4) e^{-c sqrt m}: integral comparison
            total += term * 4 * (mp.sqrt(n) / c + 1 / c ** 2 + 1) * 2
            return 4 * 48 * total
