"""Bessel functions J0, J1 and the positive zeros of J1, at arbitrary precision.

Small arguments use the ascending series with enough guard digits to absorb
its cancellation (terms peak near e^x).  Large arguments use the Hankel
expansion

    J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),   chi = x - (nu/2 + 1/4) pi,

whose P and Q remainders, for real x and nu in {0, 1}, are bounded by the
first omitted term.
"""
from __future__ import annotations

from functools import lru_cache

import mpmath as mp

from .precision import DEFAULT_PREC, PrecisionCtx, to_mpf

__all__ = ["bessel_j0", "bessel_j1", "j1_zero", "j1_zeros"]


def _series(nu: int, x, dps: int):
    guard = int(x / mp.log(10)) + 10
    with mp.workdps(dps + guard):
        h = x / 2
        h2 = h * h
        term = h ** nu / mp.factorial(nu)
        total = term
        k = 0
        eps = mp.mpf(10) ** (-(dps + guard))
        while True:
            k += 1
            term = -term * h2 / (k * (k + nu))
            total += term
            if abs(term) < eps and k > h:
                return total


def _hankel(nu: int, x, dps: int):
    """(value, bound) from the large-argument expansion, or None when its
    smallest term is still above 10^-dps."""
    tol = mp.mpf(10) ** (-dps)
    mu = 4 * nu * nu
    terms = [mp.mpf(1)]
    k = 0
    while True:
        k += 1
        t = terms[-1] * (mu - (2 * k - 1) ** 2) / (k * 8 * x)
        if abs(t) >= abs(terms[-1]) and k > 2:
            return None
        terms.append(t)
        if abs(t) < tol and k >= 3:
            break
    # terms[k] = a_k(nu) / x^k;  P uses even k with sign (-1)^(k/2), Q odd k
    P = mp.fsum((-1) ** (j // 2) * terms[j] for j in range(0, len(terms) - 1, 2))
    Q = mp.fsum((-1) ** (j // 2) * terms[j] for j in range(1, len(terms) - 1, 2))
    bound = abs(terms[-1]) + abs(terms[-2])
    chi = x - (mp.mpf(nu) / 2 + mp.mpf(1) / 4) * mp.pi
    amp = mp.sqrt(2 / (mp.pi * x))
    return amp * (P * mp.cos(chi) - Q * mp.sin(chi)), amp * bound


def _bessel(nu: int, x, prec: PrecisionCtx):
    x = to_mpf(x)
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    dps = prec.dps
    with mp.workdps(dps + 5):
        if x == 0:
            return mp.mpf(1) if nu == 0 else mp.mpf(0)
        if x > dps * mp.log(10) / 2:
            got = _hankel(nu, x, dps + 3)
            if got is not None:
                return +got[0]
        return +_series(nu, x, dps + 3)


def bessel_j0(x, prec: PrecisionCtx = DEFAULT_PREC):
    """J_0(x) for x >= 0 with absolute error below 10^-(digits + tail_margin)."""
    return _bessel(0, x, prec)


def bessel_j1(x, prec: PrecisionCtx = DEFAULT_PREC):
    """J_1(x) for x >= 0 with absolute error below 10^-(digits + tail_margin)."""
    return _bessel(1, x, prec)


@lru_cache(maxsize=None)
def _zero(k: int, digits: int, margin: int):
    prec = PrecisionCtx(digits, margin)
    with mp.workdps(prec.dps + 5):
        beta = (k + mp.mpf(1) / 4) * mp.pi
        # McMahon start, then Newton with J1' = J0 - J1/x
        x = beta - 3 / (8 * beta) + 3 / (128 * beta ** 3)
        for _ in range(60):
            j1 = bessel_j1(x, prec)
            step = j1 / (bessel_j0(x, prec) - j1 / x)
            x -= step
            if abs(step) < mp.mpf(10) ** (-prec.dps):
                return +x
    raise ArithmeticError(f"Newton iteration for the zero j_1,{k} did not settle")


def j1_zero(k: int, prec: PrecisionCtx = DEFAULT_PREC):
    """k-th positive zero of J_1 (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _zero(k, prec.digits, prec.tail_margin)


def j1_zeros(n: int, prec: PrecisionCtx = DEFAULT_PREC):
    return [j1_zero(k, prec) for k in range(1, n + 1)]
