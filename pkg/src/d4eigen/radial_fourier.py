"""Fourier transform of radial functions on R^4, used as an independent oracle.

For f(x) = F(|x|) on R^4,

    F^(s) = (2 pi / s) int_0^oo F(r) J_1(2 pi r s) r^2 dr,    F^(0) = 2 pi^2 int_0^oo F(r) r^3 dr.

The integral runs block by block between consecutive zeros of J_1(2 pi r s),
each block by adaptive Gauss-Kronrod, and stops at a truncation radius read
off the handle's decay envelope.  When the envelope is too slow for the block
budget, the partial sums are averaged repeatedly (the block integrals
alternate in sign) and the last change is taken as the error.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath as mp

from .bessel import bessel_j1, j1_zero
from .eigenfunctions import (EigenfunctionId, PrecisionError, f_minus, f_plus,
                             minus_leading, minus_leading_transform,
                             minus_remainder_bound, plus_envelope)
from .precision import PrecisionCtx, to_mpf
from .quadrature import QuadratureError, gauss_kronrod

__all__ = [
    "HandleError",
    "HankelError",
    "RadialFunctionHandle",
    "HankelQuadSpec",
    "EigenResidual",
    "hankel4",
    "eigen_residual",
    "gaussian_handle",
    "plus_handle",
    "minus_handle",
]

# the oracle runs at 30 digits; its targets are far coarser than that
ORACLE_PREC = PrecisionCtx(30)
# pointwise accuracy asked of f inside the oracle
ORACLE_F_TOL = mp.mpf("1e-18")


class HandleError(ValueError):
    """A radial function handle violates its contract."""


class HankelError(ArithmeticError):
    """Requested tolerance not reached within the block budget."""


@dataclass(frozen=True)
class RadialFunctionHandle:
    """A radial function F on R^4 as an evaluation contract.

    `eval(r)` returns (value, err).  `decay_bound(r)` bounds |F(r)| for
    r >= decay_from.  `origin_exponent` is alpha with F(r) = O(r^alpha) at 0.
    If `known_transform` is set, `eval` gives only the remainder F - K and
    the transform of K is added in closed form.
    """

    name: str
    eval: Callable
    decay_bound: Callable
    origin_exponent: int = 0
    decay_from: float = 0.0
    known_transform: Optional[Callable] = None
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.origin_exponent <= -4:
            raise HandleError(f"{self.name}: F r^3 is not integrable at 0 (alpha = {self.origin_exponent})")


@dataclass(frozen=True)
class HankelQuadSpec:
    """Frequencies, target error, truncation policy and block budget."""

    s_grid: tuple = ()
    tol: float = 1e-8
    r_max: Optional[float] = None  # None: derived from decay_bound and tol
    zero_blocks: int = 2000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.zero_blocks < 1:
            raise ValueError("zero_blocks must be >= 1")
        object.__setattr__(self, "s_grid", tuple(self.s_grid))


def _tail_integral(f: RadialFunctionHandle, r0, power: int):
    """int_{r0}^oo E(r) r^power dr."""
    return mp.quad(lambda r: f.decay_bound(r) * r ** power, [r0, 2 * r0 + 1, mp.inf])


def _truncation_radius(f: RadialFunctionHandle, s, target):
    """Smallest r on a 1/4 grid past decay_from whose tail bound is below target."""
    power = 3 if s == 0 else 2
    weight = 2 * mp.pi ** 2 if s == 0 else 2 * mp.pi / s
    r = max(mp.mpf(f.decay_from), mp.mpf(1))
    for _ in range(400):
        tail = weight * _tail_integral(f, r, power)
        if tail < target:
            return r, tail
        r += mp.mpf(1) / 4
    raise HandleError(f"{f.name}: decay bound never drops below {mp.nstr(target, 3)}")


def _block_edges(f, s, r_max, budget):
    """Zeros of J_1(2 pi r s) below r_max, merged with the handle's breakpoints."""
    edges = [mp.mpf(0)]
    if s == 0:
        step = mp.mpf(1) / 2
        k = 1
        while k * step < r_max:
            edges.append(k * step)
            k += 1
    else:
        k = 1
        while True:
            z = j1_zero(k, ORACLE_PREC) / (2 * mp.pi * s)
            if z >= r_max:
                break
            edges.append(z)
            k += 1
            if k > budget:
                break
    for b in f.breakpoints:
        b = mp.mpf(b)
        if 0 < b < edges[-1] and all(abs(b - e) > mp.mpf("1e-6") for e in edges):
            edges.append(b)
    edges.sort()
    return edges, len(edges) - 1 >= budget


def _accelerate(partials):
    """Repeated averaging of the last partial sums -> (value, change)."""
    row = list(partials[-12:])
    prev = row[-1]
    while len(row) > 1:
        row = [(a + b) / 2 for a, b in zip(row, row[1:])]
    return row[0], abs(row[0] - prev)


def hankel4(f: RadialFunctionHandle, s, spec: HankelQuadSpec = HankelQuadSpec()):
    """Transform of the radial function f on R^4 at frequency s -> (value, err)."""
    s = to_mpf(s)
    if s < 0:
        raise ValueError("s must be >= 0")
    with mp.workdps(ORACLE_PREC.dps):
        tol = mp.mpf(spec.tol)
        if s == 0:
            weight = 2 * mp.pi ** 2
            kernel = lambda r: r ** 3  # noqa: E731
        else:
            weight = 2 * mp.pi / s
            kernel = lambda r: bessel_j1(2 * mp.pi * r * s, ORACLE_PREC) * r * r  # noqa: E731
        if spec.r_max is None:
            r_max, tail = _truncation_radius(f, s, tol / 10)
        else:
            r_max = mp.mpf(spec.r_max)
            if r_max < f.decay_from:
                raise HandleError(f"r_max {r_max} lies below decay_from {f.decay_from}")
            tail = weight * _tail_integral(f, r_max, 3 if s == 0 else 2)
        edges, exhausted = _block_edges(f, s, r_max, spec.zero_blocks)
        if not exhausted and edges[-1] < r_max:
            edges.append(r_max)
        n_blocks = len(edges) - 1
        block_tol = tol / (10 * weight * max(n_blocks, 1))
        f_err = [mp.mpf(0)]

        def integrand(r):
            v, e = f.eval(r)
            kr = kernel(r)
            if abs(kr) * e > f_err[0]:
                f_err[0] = abs(kr) * e
            return v * kr

        total = mp.mpf(0)
        quad_err = mp.mpf(0)
        partials = []
        pointwise = mp.mpf(0)
        for a, b in zip(edges, edges[1:]):
            f_err[0] = mp.mpf(0)
            try:
                v, e = gauss_kronrod(integrand, a, b, block_tol)
            except QuadratureError as exc:
                raise HankelError(f"{f.name} at s = {mp.nstr(s, 8)}: {exc}") from exc
            total += v
            quad_err += e
            pointwise += f_err[0] * (b - a)
            partials.append(total)
        if exhausted:
            if len(partials) < 3:
                raise HankelError("block budget too small to accelerate")
            total, tail = _accelerate(partials)
        value = weight * total
        err = weight * (quad_err + pointwise) + tail
        if f.known_transform is not None:
            value += f.known_transform(s)
        if err > tol:
            raise HankelError(f"{f.name} at s = {mp.nstr(s, 8)}: err {mp.nstr(err, 3)} above {mp.nstr(tol, 3)}"
                              f" within {spec.zero_blocks} blocks")
        return +value, +err


# ---------------------------------------------------------------------------
# handles


def gaussian_handle(t=1, scale=1) -> RadialFunctionHandle:
    """scale * exp(-pi t r^2), transform scale * t^-2 exp(-pi s^2 / t)."""
    t = to_mpf(t)
    scale = to_mpf(scale)
    return RadialFunctionHandle(
        name=f"gauss(t={mp.nstr(t, 6)})",
        eval=lambda r: (scale * mp.exp(-mp.pi * t * r * r), mp.mpf(0)),
        decay_bound=lambda r: abs(scale) * mp.exp(-mp.pi * t * r * r),
    )


def gaussian_mixture_handle(terms) -> RadialFunctionHandle:
    """sum c_j exp(-pi t_j r^2) for pairs (c_j, t_j)."""
    terms = [(to_mpf(c), to_mpf(t)) for c, t in terms]
    tmin = min(t for _, t in terms)
    cmax = sum(abs(c) for c, _ in terms)
    return RadialFunctionHandle(
        name="gauss-mixture",
        eval=lambda r: (mp.fsum(c * mp.exp(-mp.pi * t * r * r) for c, t in terms), mp.mpf(0)),
        decay_bound=lambda r: cmax * mp.exp(-mp.pi * tmin * r * r),
    )


def _plus_eval(r):
    ev = f_plus(r, ORACLE_PREC, tol=ORACLE_F_TOL)
    return ev.value, ev.err


def plus_handle() -> RadialFunctionHandle:
    return RadialFunctionHandle(
        name="f_plus",
        eval=_plus_eval,
        decay_bound=plus_envelope,
        origin_exponent=0,
        decay_from=1.5,
        breakpoints=(mp.sqrt(2),),
    )


def _minus_remainder_eval(r):
    ev = f_minus(r, ORACLE_PREC, tol=ORACLE_F_TOL)
    return ev.value - minus_leading(r), ev.err


def minus_handle() -> RadialFunctionHandle:
    """f_minus split as h + R; h(r) = 4 sin^2(pi r^2/2)/(pi r^2) has a closed-form
    transform and R decays like exp(-2 pi sqrt(2) r)."""
    return RadialFunctionHandle(
        name="f_minus",
        eval=_minus_remainder_eval,
        decay_bound=minus_remainder_bound,
        origin_exponent=-2,
        decay_from=1.0,
        known_transform=minus_leading_transform,
    )


@dataclass
class EigenResidual:
    which: EigenfunctionId
    tol: object
    rows: list = field(default_factory=list)  # (s, transform, transform_err, f, f_err, residual)

    @property
    def max_residual(self):
        return max(r[5] for r in self.rows)

    @property
    def argmax(self):
        return max(self.rows, key=lambda r: r[5])[0]

    @property
    def propagated_err(self):
        return max(r[2] + r[4] for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol + self.propagated_err


def eigen_residual(which, grid: Sequence = (), spec: Optional[HankelQuadSpec] = None) -> EigenResidual:
    """max over the grid of |F^(s) - eps F(s)| with eps the eigenvalue."""
    which = EigenfunctionId.parse(which)
    spec = spec or HankelQuadSpec()
    grid = list(grid) or list(spec.s_grid)
    if not grid:
        raise ValueError("empty s grid")
    eps = which.eigenvalue
    handle = plus_handle() if which is EigenfunctionId.PlusD4 else minus_handle()
    out = EigenResidual(which, mp.mpf(spec.tol))
    for s in grid:
        s = to_mpf(s)
        if which is EigenfunctionId.MinusD4 and not s > 0:
            raise ValueError("f_minus has no value at s = 0")
        if not (0 <= s <= 5):
            raise ValueError("grid must lie in [0, 5]")
        tv, te = hankel4(handle, s, spec)
        with mp.workdps(ORACLE_PREC.dps):
            ev = f_plus(s, ORACLE_PREC) if eps == 1 else f_minus(s, ORACLE_PREC)
            out.rows.append((s, tv, te, ev.value, ev.err, abs(tv - eps * ev.value)))
    return out
