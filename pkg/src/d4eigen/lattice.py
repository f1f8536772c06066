"""D4 and its dual: enumeration, theta cross-check, Poisson residual, sign scans.

D4 = {x in Z^4 : sum x_i even}.  Its dual is {y : <y, b> in Z for every
generator b}, which works out to Z^4 together with Z^4 + (1/2, 1/2, 1/2, 1/2).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .eigenfunctions import EigenfunctionId, f_minus, f_plus, plus_envelope
from .precision import DEFAULT_PREC, PrecisionCtx, to_mpf
from .qseries import SeriesId, build_series, coefficient

__all__ = [
    "LatticeName",
    "LatticeModel",
    "NormCountTable",
    "ThetaMismatchError",
    "PoissonReport",
    "SignScanReport",
    "D4_BASIS",
    "vectors",
    "enumerate_norms",
    "theta_crosscheck",
    "poisson_residual",
    "sign_scan",
]

D4_BASIS = ((1, 1, 0, 0), (1, -1, 0, 0), (0, 1, 1, 0), (0, 0, 1, 1))


class LatticeName(enum.Enum):
    D4 = "D4"
    D4dual = "D4dual"

    @classmethod
    def parse(cls, tag) -> "LatticeName":
        if isinstance(tag, cls):
            return tag
        key = str(tag).lower().replace("*", "dual").replace("_", "")
        for m in cls:
            if m.value.lower() == key:
                return m
        raise ValueError(f"unknown lattice {tag!r}")


def _det(rows) -> Fraction:
    m = [[Fraction(v) for v in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            for j in range(c, n):
                m[i][j] -= f * m[c][j]
    return det


def _inverse(rows):
    n = len(rows)
    m = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [v / piv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [row[n:] for row in m]


@dataclass(frozen=True)
class LatticeModel:
    """Lattice spanned by the rows of `basis` (exact rationals)."""

    name: LatticeName
    basis: tuple

    @classmethod
    def d4(cls) -> "LatticeModel":
        return cls(LatticeName.D4, tuple(tuple(Fraction(v) for v in row) for row in D4_BASIS))

    @classmethod
    def of(cls, which) -> "LatticeModel":
        which = LatticeName.parse(which)
        d4 = cls.d4()
        return d4 if which is LatticeName.D4 else d4.dual()

    @property
    def covolume(self) -> Fraction:
        return abs(_det(self.basis))

    def dual(self) -> "LatticeModel":
        inv = _inverse(self.basis)
        # rows of the inverse-transpose
        rows = tuple(tuple(inv[j][i] for j in range(4)) for i in range(4))
        other = LatticeName.D4dual if self.name is LatticeName.D4 else LatticeName.D4
        return LatticeModel(other, rows)

    def coordinates(self, v):
        """Solve v = sum_i y_i basis_i for y."""
        inv = _inverse(self.basis)
        return [sum(Fraction(v[i]) * inv[i][j] for i in range(4)) for j in range(4)]

    def contains(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))


@dataclass(frozen=True)
class NormCountTable:
    """Count of nonzero lattice vectors by squared norm, complete through max_norm."""

    lattice: LatticeName
    entries: dict
    max_norm: int

    def count(self, norm) -> int:
        if norm > self.max_norm:
            raise ValueError(f"table only complete through {self.max_norm}")
        return self.entries.get(_norm_key(Fraction(norm)), 0)

    def as_json_dict(self):
        return {_fmt_norm(n): c for n, c in sorted(self.entries.items())}


def _norm_key(n: Fraction):
    return n.numerator if n.denominator == 1 else n


def _fmt_norm(n) -> str:
    n = Fraction(n)
    return str(n.numerator) if n.denominator == 1 else f"{n.numerator}/{n.denominator}"


def _box(bound2: int):
    """Integer vectors w in Z^4 with |w|^2 <= bound2 (pruned nested loops)."""
    lim = math.isqrt(bound2)
    for a in range(-lim, lim + 1):
        ra = bound2 - a * a
        lb = math.isqrt(ra)
        for b in range(-lb, lb + 1):
            rb = ra - b * b
            lc = math.isqrt(rb)
            for c in range(-lc, lc + 1):
                rc = rb - c * c
                ld = math.isqrt(rc)
                for d in range(-ld, ld + 1):
                    yield a, b, c, d


def vectors(which, max_norm):
    """Nonzero lattice vectors (tuples of Fractions) with squared norm <= max_norm.

    D4: coordinate box with the even-sum filter.  D4dual: the half-integer
    grid w/2, kept when every pairing with a D4 generator is an integer.
    """
    which = LatticeName.parse(which)
    if which is LatticeName.D4:
        for v in _box(int(max_norm)):
            if any(v) and sum(v) % 2 == 0:
                yield tuple(Fraction(c) for c in v)
    else:
        # y = w/2 with |y|^2 <= max_norm  <=>  |w|^2 <= 4 max_norm
        for w in _box(int(4 * max_norm)):
            # <y, b> = <w, b>/2 must be an integer for each generator b
            if any(w) and all(sum(wi * bi for wi, bi in zip(w, b)) % 2 == 0 for b in D4_BASIS):
                yield tuple(Fraction(c, 2) for c in w)


def enumerate_norms(which, max_norm: int) -> NormCountTable:
    """Exact counts of nonzero vectors by squared norm up to max_norm."""
    which = LatticeName.parse(which)
    if max_norm < 2:
        raise ValueError(f"max_norm must be >= 2, got {max_norm}")
    counts: dict = {}
    if which is LatticeName.D4:
        for v in _box(max_norm):
            if sum(v) % 2 == 0:
                n = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]
                if n:
                    counts[n] = counts.get(n, 0) + 1
    else:
        for v in vectors(which, max_norm):
            n = _norm_key(sum(c * c for c in v))
            counts[n] = counts.get(n, 0) + 1
    return NormCountTable(which, dict(sorted(counts.items())), max_norm)


class ThetaMismatchError(RuntimeError):
    """Enumerated counts disagree with the theta-series coefficients."""

    def __init__(self, rows):
        bad = [r for r in rows if r[3] != 0]
        super().__init__(f"theta/enumeration mismatch at norms {[r[0] for r in bad]}")
        self.rows = rows


def theta_crosscheck(max_norm: int):
    """Rows (n, series coefficient, enumerated count, difference) for n = 0..max_norm.

    The coefficient of q^(n/2) in (Theta3^4 + Theta4^4)/2 counts the vectors of
    Z^4 with even squared norm n, which are exactly the D4 vectors.
    """
    order = 4 * max_norm
    series = build_series(SeriesId.D4Theta, max(order, 8))
    table = enumerate_norms(LatticeName.D4, max(max_norm, 2))
    rows = []
    for n in range(max_norm + 1):
        coeff = coefficient(series, Fraction(n, 2))
        counted = 1 if n == 0 else table.entries.get(n, 0)
        rows.append((n, int(coeff), counted, int(coeff) - counted))
    if any(r[3] for r in rows):
        raise ThetaMismatchError(rows)
    return rows


# ---------------------------------------------------------------------------
# Poisson summation


@dataclass(frozen=True)
class PoissonReport:
    r_max: object
    lhs: object
    lhs_err: object
    rhs: object
    rhs_err: object
    tail: object
    residual: object
    tolerance: object

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def as_dict(self):
        return {k: mp.nstr(getattr(self, k), 20) for k in
                ("r_max", "lhs", "lhs_err", "rhs", "rhs_err", "tail", "residual", "tolerance")}


def _dual_count_bound(n: int) -> int:
    # dual norm n has as many vectors as D4 norm 2n, at most r_4(2n) <= 8 sigma(2n)
    m = 2 * n
    return 8 * m * (1 + mp.log(m))


def _dual_tail(r_max, prec: PrecisionCtx):
    """Bound on (1/2) sum over dual vectors with |y| > r_max of |f_plus(|y|)|."""
    n = math.floor(mp.mpf(r_max) ** 2) + 1
    total = mp.mpf(0)
    while True:
        term = _dual_count_bound(n) * plus_envelope(mp.sqrt(n))
        total += term
        if term < prec.eps * total or term < mp.mpf(10) ** (-2 * prec.dps):
            # terms shrink by at least e^{-pi/sqrt(n)} per step beyond here
            total += term / (1 - mp.exp(-mp.pi / mp.sqrt(n)))
            return total / 2
        n += 1


def poisson_residual(r_max=6, prec: PrecisionCtx = DEFAULT_PREC, tolerance=1e-8) -> PoissonReport:
    """Sum of f_plus over D4 against (1/covol) times the sum over D4dual.

    The dual side uses the transform f_plus itself.  Every D4 norm is an even
    integer, so the left side vanishes up to err; the check therefore says the
    count-weighted f_plus values over odd dual norms sum to zero.
    """
    r_max = to_mpf(r_max)
    if r_max < 4:
        raise ValueError("r_max must be >= 4")
    nmax = int(mp.floor(r_max ** 2))
    with mp.workdps(prec.dps + 10):
        covol = LatticeModel.d4().covolume
        values = {}

        def f_at(n):
            if n not in values:
                values[n] = f_plus(mp.sqrt(n), prec)
            return values[n]

        lhs = lhs_err = mp.mpf(0)
        for n, c in enumerate_norms(LatticeName.D4, max(nmax, 2)).entries.items():
            if n <= nmax:
                ev = f_at(n)
                lhs += c * ev.value
                lhs_err += c * ev.err
        lhs += f_plus(0, prec).value  # the origin
        rhs = rhs_err = mp.mpf(0)
        for n, c in enumerate_norms(LatticeName.D4dual, max(nmax, 2)).entries.items():
            if n <= nmax:
                ev = f_at(int(n))
                rhs += c * ev.value
                rhs_err += c * ev.err
        rhs = (rhs + f_plus(0, prec).value) / covol
        rhs_err = rhs_err / covol
        tail = _dual_tail(r_max, prec)
        residual = abs(lhs - rhs) + lhs_err + rhs_err + tail
        return PoissonReport(r_max, +lhs, +lhs_err, +rhs, +rhs_err, +tail, +residual,
                             to_mpf(tolerance))


# ---------------------------------------------------------------------------
# sign scans


@dataclass
class SignScanReport:
    """Grid scan of an eigenfunction; `violations` are points beyond the claimed
    radius with value < -tolerance."""

    which: EigenfunctionId
    grid_min: object
    grid_max: object
    step: object
    claimed_radius: object
    tolerance: object
    last_sign_change: object
    min_beyond: object
    violations: list = field(default_factory=list)
    negatives_below: list = field(default_factory=list)
    forced_zero_checks: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self):
        return {
            "which": self.which.name,
            "grid_min": mp.nstr(self.grid_min, 12),
            "grid_max": mp.nstr(self.grid_max, 12),
            "step": mp.nstr(self.step, 12),
            "claimed_radius": mp.nstr(self.claimed_radius, 15),
            "tolerance": mp.nstr(self.tolerance, 3),
            "last_sign_change": None if self.last_sign_change is None
            else mp.nstr(self.last_sign_change, 15),
            "min_beyond": mp.nstr(self.min_beyond, 15),
            "violations": [[mp.nstr(r, 12), mp.nstr(v, 12)] for r, v in self.violations],
            "negatives_below": len(self.negatives_below),
            "forced_zero_checks": [[mp.nstr(r, 15), mp.nstr(v, 5), mp.nstr(e, 5)]
                                   for r, v, e in self.forced_zero_checks],
        }


def _evaluator(which: EigenfunctionId, prec: PrecisionCtx):
    if which is EigenfunctionId.PlusD4:
        return lambda r: f_plus(r, prec)
    return lambda r: f_minus(r, prec)


def _sign(ev) -> int:
    if ev.value > ev.err:
        return 1
    if ev.value < -ev.err:
        return -1
    return 0


def _grid(r_min, r_max, step, claimed, fine_step):
    pts = set()
    k = 0
    while True:
        r = r_min + k * step
        if r > r_max:
            break
        pts.add(r)
        k += 1
    lo, hi = max(r_min, claimed - Fraction(1, 10)), min(r_max, claimed + Fraction(1, 10))
    k = 0
    start = Fraction(math.ceil(lo / fine_step)) * fine_step
    while start + k * fine_step <= hi:
        pts.add(start + k * fine_step)
        k += 1
    return sorted(pts)


def sign_scan(which, r_min, r_max, step, tol=1e-10, prec: PrecisionCtx | None = None,
              bisect_tol=1e-12) -> SignScanReport:
    """Scan f on a grid, refine the last sign change by bisection, and list
    points beyond sqrt(2) where f < -tol.

    Grid points are exact rationals; the band within 0.1 of sqrt(2) is
    sampled at step/10.
    """
    which = EigenfunctionId.parse(which)
    prec = prec or PrecisionCtx(30)
    r_min, r_max, step = (Fraction(str(v)) if isinstance(v, float) else Fraction(v)
                          for v in (r_min, r_max, step))
    if not (0 < r_min < r_max) or step <= 0:
        raise ValueError("need 0 < r_min < r_max and step > 0")
    if which is EigenfunctionId.MinusD4 and r_min <= 0:
        raise ValueError("f_minus scans must start at r > 0")
    claimed = math.sqrt(2)
    f = _evaluator(which, prec)
    tol = to_mpf(tol)
    with mp.workdps(prec.dps):
        claimed_mp = mp.sqrt(2)
        pts = _grid(r_min, r_max, step, Fraction(claimed), step / 10)
        samples = []
        for q in pts:
            r = mp.mpf(q.numerator) / q.denominator
            samples.append((r, f(r)))
        # last strict sign change between consecutive points with a definite sign
        last = None
        signed = [(r, ev) for r, ev in samples if _sign(ev) != 0]
        for (ra, ea), (rb, eb) in zip(signed, signed[1:]):
            if _sign(ea) != _sign(eb):
                last = (ra, rb, _sign(ea))
        last_change = None
        if last is not None:
            a, b, sa = last
            while b - a > bisect_tol:
                m = (a + b) / 2
                sm = _sign(f(m))
                if sm == 0:
                    a = b = m
                    break
                if sm == sa:
                    a = m
                else:
                    b = m
            last_change = (a + b) / 2
        start = last_change if last_change is not None else samples[0][0]
        beyond = [ev.value for r, ev in samples if r >= start]
        min_beyond = min(beyond) if beyond else mp.mpf(0)
        violations = [(r, ev.value) for r, ev in samples if r > claimed_mp and ev.value < -tol]
        negatives = [(r, ev.value) for r, ev in samples
                     if 1 < r < mp.mpf("1.4") and ev.value < -tol]
        zeros = []
        k = 1
        while mp.sqrt(2 * k) <= mp.mpf(r_max.numerator) / r_max.denominator:
            z = mp.sqrt(2 * k)
            if z >= mp.mpf(r_min.numerator) / r_min.denominator:
                ev = f(z)
                zeros.append((z, ev.value, ev.err))
            k += 1
    return SignScanReport(which, r_min, r_max, step, claimed_mp, tol, last_change,
                          min_beyond, violations, negatives, zeros,
                          [(r, ev.value, ev.err) for r, ev in samples])
