"""Exact truncated q-expansions on the grid u = q^(1/8).

Every series used here (theta functions, Delta, Eisenstein series and the
weakly holomorphic form phi) lives on one integer exponent grid in units of
u = q^(1/8).  Raw Theta_2 sits on odd squares, everything else we build on
multiples of 4 (half-integer q-powers).

Coefficients are Python ints, or Fractions when a division really happens
(the Eisenstein route to Delta divides by 1728).
"""
from __future__ import annotations

import enum
import os
import tempfile
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "HalfStepSeries",
    "SeriesId",
    "SeriesError",
    "TruncationError",
    "IntegralityError",
    "Identity",
    "build_series",
    "series_mul",
    "series_inverse",
    "shift_T",
    "identity_residual",
    "coefficient",
    "laplace_terms",
    "save_series",
    "load_series",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 400  # u-units, i.e. through q^50


class SeriesError(ValueError):
    pass


class TruncationError(SeriesError):
    """Requested a coefficient that lies beyond the known truncation."""


class IntegralityError(RuntimeError):
    """A series that must have integer coefficients acquired a fraction."""


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class HalfStepSeries:
    """Truncated Laurent series sum c_i u^(min_exp + i), known mod u^(order+1).

    The zero series is stored with no coefficients and min_exp = order + 1.
    """

    __slots__ = ("min_exp", "coeffs", "order")

    def __init__(self, min_exp: int, coeffs, order: int):
        coeffs = [_norm(c) for c in coeffs]
        # drop anything past the truncation
        keep = order - min_exp + 1
        if keep < len(coeffs):
            coeffs = coeffs[:max(keep, 0)]
        # strip leading zeros so coeffs[0] != 0
        i = 0
        while i < len(coeffs) and coeffs[i] == 0:
            i += 1
        if i == len(coeffs):
            self.min_exp = order + 1
            self.coeffs = ()
        else:
            min_exp += i
            coeffs = coeffs[i:]
            coeffs.extend([0] * (order - min_exp + 1 - len(coeffs)))
            self.min_exp = min_exp
            self.coeffs = tuple(coeffs)
        self.order = order

    # construction helpers

    @classmethod
    def zero(cls, order: int) -> "HalfStepSeries":
        return cls(order + 1, [], order)

    @classmethod
    def one(cls, order: int) -> "HalfStepSeries":
        return cls(0, [1], order)

    @classmethod
    def monomial(cls, exp: int, coeff, order: int) -> "HalfStepSeries":
        return cls(exp, [coeff], order)

    @classmethod
    def from_terms(cls, terms: dict, order: int) -> "HalfStepSeries":
        """Build from a {u-exponent: coefficient} mapping."""
        terms = {e: c for e, c in terms.items() if c != 0 and e <= order}
        if not terms:
            return cls.zero(order)
        lo = min(terms)
        coeffs = [0] * (order - lo + 1)
        for e, c in terms.items():
            coeffs[e - lo] = c
        return cls(lo, coeffs, order)

    # inspection

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def items(self):
        """Yield (u_exponent, coefficient) for the nonzero terms."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.min_exp + i, c

    def __getitem__(self, u_exp: int):
        if u_exp > self.order:
            raise TruncationError(
                f"u^{u_exp} is unknown beyond truncation order {self.order}")
        if u_exp < self.min_exp:
            return 0
        return self.coeffs[u_exp - self.min_exp]

    def truncate(self, order: int) -> "HalfStepSeries":
        if order > self.order:
            raise SeriesError(f"cannot raise order {self.order} to {order}")
        return HalfStepSeries(self.min_exp, list(self.coeffs), order)

    def __eq__(self, other):
        if not isinstance(other, HalfStepSeries):
            return NotImplemented
        return (self.min_exp, self.coeffs, self.order) == \
            (other.min_exp, other.coeffs, other.order)

    def __hash__(self):
        return hash((self.min_exp, self.coeffs, self.order))

    def __repr__(self):
        head = ", ".join(f"{c}*u^{e}" for e, c in list(self.items())[:4])
        return f"HalfStepSeries({head}{', ...' if len(self.coeffs) > 4 else ''}; O(u^{self.order + 1}))"

    # ring operations

    def __neg__(self):
        return HalfStepSeries(self.min_exp, [-c for c in self.coeffs], self.order)

    def __add__(self, other):
        if isinstance(other, (int, Rational)):
            other = HalfStepSeries(0, [other], self.order)
        if not isinstance(other, HalfStepSeries):
            return NotImplemented
        order = min(self.order, other.order)
        lo = min(self.min_exp, other.min_exp)
        if lo > order:
            return HalfStepSeries.zero(order)
        out = [0] * (order - lo + 1)
        for s in (self, other):
            off = s.min_exp - lo
            for i, c in enumerate(s.coeffs):
                if off + i < len(out):
                    out[off + i] += c
        return HalfStepSeries(lo, out, order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Rational)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return HalfStepSeries(self.min_exp, [c * other for c in self.coeffs], self.order)
        if not isinstance(other, HalfStepSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (Fraction(1) / other)
        if isinstance(other, HalfStepSeries):
            return series_mul(self, series_inverse(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = HalfStepSeries.one(self.order)
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else series_mul(result, base)
                first = False
            n >>= 1
            if n:
                base = series_mul(base, base)
        return result


def series_mul(a: HalfStepSeries, b: HalfStepSeries) -> HalfStepSeries:
    """Exact Cauchy product; the result order never overstates what is known."""
    order = min(a.order + b.min_exp, b.order + a.min_exp)
    lo = a.min_exp + b.min_exp
    if a.is_zero() or b.is_zero() or lo > order:
        return HalfStepSeries.zero(order)
    n = order - lo + 1
    out = [0] * n
    bc = b.coeffs
    nb = len(bc)
    for i, ca in enumerate(a.coeffs):
        if i >= n:
            break
        if not ca:
            continue
        for j in range(min(nb, n - i)):
            cb = bc[j]
            if cb:
                out[i + j] += ca * cb
    return HalfStepSeries(lo, out, order)


def series_inverse(a: HalfStepSeries) -> HalfStepSeries:
    """Multiplicative inverse; min_exp flips sign, relative precision is kept."""
    if a.is_zero():
        raise SeriesError("zero series has no inverse")
    m = a.min_exp
    order = a.order - 2 * m
    n = a.order - m + 1
    c = a.coeffs
    c0 = c[0]
    inv0 = c0 if c0 in (1, -1) else Fraction(1) / c0
    b = [0] * n
    b[0] = inv0
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            cj = c[j]
            if cj:
                acc += cj * b[k - j]
        b[k] = _norm(-acc * inv0)
    return HalfStepSeries(-m, b, order)


def shift_T(a: HalfStepSeries) -> HalfStepSeries:
    """z -> z + 1 on a series supported on half-integer q-powers."""
    out = []
    for i, c in enumerate(a.coeffs):
        e = a.min_exp + i
        if c and e % 4:
            raise SeriesError(
                f"shift_T needs exponents divisible by 4, found u^{e}")
        out.append(-c if c and (e // 4) % 2 else c)
    return HalfStepSeries(a.min_exp, out, a.order)


def coefficient(a: HalfStepSeries, q_exponent) -> Fraction | int:
    """Exact coefficient of q^q_exponent (q_exponent*8 must be an integer)."""
    e = Fraction(q_exponent) * 8
    if e.denominator != 1:
        raise SeriesError(f"q^{q_exponent} is not on the q^(1/8) grid")
    return a[int(e)]


def laplace_terms(a: HalfStepSeries) -> list[tuple[Fraction, int | Fraction]]:
    """Term data (rate m, weight w) so that a(it) = sum w * exp(-pi*m*t).

    q^(m/2) at z = it equals exp(-pi*m*t); this needs half-integer support.
    """
    terms = []
    for e, c in a.items():
        if e % 4:
            raise SeriesError(f"u^{e} is not a half-integer q-power")
        terms.append((Fraction(e, 4), c))
    return terms


# ---------------------------------------------------------------------------
# named series


class SeriesId(enum.Enum):
    Theta2 = "theta2"
    Theta3 = "theta3"
    Theta4 = "theta4"
    Delta = "delta"
    DeltaEis = "deltaeis"
    E2 = "e2"
    E4 = "e4"
    E6 = "e6"
    Phi = "phi"
    Psi = "psi"
    PhiT = "phit"
    D4Theta = "d4theta"

    @classmethod
    def parse(cls, tag) -> "SeriesId":
        if isinstance(tag, cls):
            return tag
        key = str(tag).lower()
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        raise SeriesError(f"unknown series tag {tag!r}")


def _sigma_table(k: int, nmax: int) -> list[int]:
    sig = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        p = d ** k
        for m in range(d, nmax + 1, d):
            sig[m] += p
    return sig


def _theta3(order):
    terms = {0: 1}
    n = 1
    while 4 * n * n <= order:
        terms[4 * n * n] = 2
        n += 1
    return HalfStepSeries.from_terms(terms, order)


def _theta4(order):
    terms = {0: 1}
    n = 1
    while 4 * n * n <= order:
        terms[4 * n * n] = 2 if n % 2 == 0 else -2
        n += 1
    return HalfStepSeries.from_terms(terms, order)


def _theta2(order):
    terms = {}
    a = 0
    while (2 * a + 1) ** 2 <= order:
        terms[(2 * a + 1) ** 2] = 2
        a += 1
    return HalfStepSeries.from_terms(terms, order)


def _delta_product(order):
    # q * prod (1 - q^n)^24, multiplied out factor by factor
    n_len = order - 8 + 1
    p = [0] * n_len
    p[0] = 1
    n = 1
    while 8 * n < n_len:
        step = 8 * n
        for _ in range(24):
            for k in range(n_len - 1, step - 1, -1):
                p[k] -= p[k - step]
        n += 1
    return HalfStepSeries(8, p, order)


def _eisenstein(weight, order):
    scale = {2: -24, 4: 240, 6: -504}[weight]
    nmax = order // 8
    sig = _sigma_table(weight - 1, nmax)
    terms = {0: 1}
    for n in range(1, nmax + 1):
        terms[8 * n] = scale * sig[n]
    return HalfStepSeries.from_terms(terms, order)


def _p12(s):
    return s ** 12


_INTEGER_SERIES = {
    SeriesId.Theta2, SeriesId.Theta3, SeriesId.Theta4, SeriesId.Delta,
    SeriesId.DeltaEis, SeriesId.E2, SeriesId.E4, SeriesId.E6, SeriesId.Phi,
    SeriesId.Psi, SeriesId.PhiT, SeriesId.D4Theta,
}


@lru_cache(maxsize=64)
def _build(sid: SeriesId, order: int) -> HalfStepSeries:
    # Delta^-1 costs 16 u-units of order, so build the pieces with headroom
    work = order + 16
    if sid is SeriesId.Theta2:
        return _theta2(order)
    if sid is SeriesId.Theta3:
        return _theta3(order)
    if sid is SeriesId.Theta4:
        return _theta4(order)
    if sid is SeriesId.Delta:
        return _delta_product(order)
    if sid is SeriesId.E2:
        return _eisenstein(2, order)
    if sid is SeriesId.E4:
        return _eisenstein(4, order)
    if sid is SeriesId.E6:
        return _eisenstein(6, order)
    if sid is SeriesId.DeltaEis:
        e4 = _eisenstein(4, order)
        e6 = _eisenstein(6, order)
        return (e4 ** 3 - e6 ** 2) * Fraction(1, 1728)
    if sid is SeriesId.D4Theta:
        return (_theta3(order) ** 4 + _theta4(order) ** 4) * Fraction(1, 2)

    t2, t3, t4 = (_p12(f(work)) for f in (_theta2, _theta3, _theta4))
    inv_delta = series_inverse(_delta_product(work + 16))
    if sid is SeriesId.Phi:
        num = t4 * (t3 + t2)
    elif sid is SeriesId.Psi:
        num = t2 * (t3 + t4)
    elif sid is SeriesId.PhiT:
        num = t3 * (t4 - t2)
    else:  # pragma: no cover
        raise SeriesError(f"no construction for {sid}")
    return series_mul(num, inv_delta).truncate(order)


def build_series(sid, order: int = DEFAULT_ORDER) -> HalfStepSeries:
    """Exact expansion of a named series, known through u^order."""
    sid = SeriesId.parse(sid)
    if order < 8:
        raise SeriesError(f"order must be >= 8 u-units, got {order}")
    s = _build(sid, order)
    if sid in _INTEGER_SERIES and not s.is_integral():
        raise IntegralityError(f"{sid.name} acquired a non-integer coefficient")
    return s


# ---------------------------------------------------------------------------
# identities


class Identity(enum.Enum):
    Jacobi = "jacobi"
    FuncEq1 = "funceq1"
    DeltaCross = "deltacross"
    D4Theta = "d4theta"

    @classmethod
    def parse(cls, tag) -> "Identity":
        if isinstance(tag, cls):
            return tag
        key = str(tag).lower()
        for m in cls:
            if m.value == key or m.name.lower() == key:
                return m
        raise SeriesError(f"unknown identity {tag!r}")


def identity_residual(which, order: int = DEFAULT_ORDER) -> HalfStepSeries:
    """Residual series of a named identity; zero through `order` means PASS."""
    which = Identity.parse(which)
    if order < 8:
        raise SeriesError(f"order must be >= 8 u-units, got {order}")
    if which is Identity.Jacobi:
        t2, t3, t4 = (build_series(s, order) ** 4 for s in
                      (SeriesId.Theta2, SeriesId.Theta3, SeriesId.Theta4))
        return t3 - t2 - t4
    if which is Identity.FuncEq1:
        # phi(z+1) - phi(z) = -phi(-1/z) when d = 4
        return (build_series(SeriesId.PhiT, order) - build_series(SeriesId.Phi, order)
                + build_series(SeriesId.Psi, order))
    if which is Identity.DeltaCross:
        return build_series(SeriesId.Delta, order) - build_series(SeriesId.DeltaEis, order)
    # lattice counts of D4 by squared norm n sit at q^(n/2) = u^(4n)
    from .lattice import enumerate_norms

    table = enumerate_norms("D4", order // 4)
    counted = HalfStepSeries.from_terms(
        {0: 1, **{4 * int(n): c for n, c in table.entries.items()}}, order)
    return build_series(SeriesId.D4Theta, order) - counted


# ---------------------------------------------------------------------------
# cache files


def save_series(series: HalfStepSeries, path, tag: str) -> None:
    """Write `series` atomically in the qseries-cache v1 text format."""
    path = os.fspath(path)
    lines = [f"qseries-cache v1 {tag} {series.min_exp} {series.order}"]
    lines.extend(str(c) for c in series.coeffs)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qseries-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_series(path) -> tuple[str, HalfStepSeries]:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[:2] != ["qseries-cache", "v1"]:
            raise SeriesError(f"{path}: not a qseries-cache v1 file")
        tag, min_exp, order = header[2], int(header[3]), int(header[4])
        coeffs = [Fraction(line.strip()) for line in fh if line.strip()]
    s = HalfStepSeries(min_exp, coeffs, order)
    if s.min_exp != min_exp and coeffs:
        raise SeriesError(f"{path}: leading coefficient is zero")
    return tag, s
