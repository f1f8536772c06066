"""Precision contexts and points of the upper half-plane."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

__all__ = ["PrecisionCtx", "UpperHalfPoint", "DEFAULT_PREC", "to_mpf"]


@dataclass(frozen=True)
class PrecisionCtx:
    """Working precision for numeric evaluation.

    `digits` is the accuracy promised to callers; `tail_margin` extra digits
    are carried internally so truncation and rounding stay below it.
    """

    digits: int = 64
    tail_margin: int = 10

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError(f"digits must be >= 30, got {self.digits}")
        if self.tail_margin < 0:
            raise ValueError("tail_margin must be non-negative")

    @property
    def dps(self) -> int:
        return self.digits + self.tail_margin

    @property
    def tail_tol(self):
        """Target size for discarded tails, 10^-(digits + tail_margin)."""
        return mp.mpf(10) ** (-self.dps)

    @property
    def eps(self):
        return mp.mpf(10) ** (-self.digits)

    def workdps(self, extra: int = 0):
        return mp.workdps(self.dps + extra)


DEFAULT_PREC = PrecisionCtx()


def to_mpf(v):
    """Exact conversion of ints, Fractions, strings and floats to mpf."""
    if isinstance(v, mp.mpf):
        return v
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, float):
        return mp.mpf(v.numerator) / v.denominator
    return mp.mpf(v)


@dataclass(frozen=True)
class UpperHalfPoint:
    """z = x + iy with y > 0."""

    x: object
    y: object

    def __post_init__(self):
        object.__setattr__(self, "x", to_mpf(self.x))
        object.__setattr__(self, "y", to_mpf(self.y))
        if not self.y > 0:
            raise ValueError(f"Im z must be positive, got {self.y}")

    @classmethod
    def of(cls, z) -> "UpperHalfPoint":
        if isinstance(z, cls):
            return z
        z = mp.mpc(z)
        return cls(z.real, z.imag)

    @classmethod
    def imag_axis(cls, t) -> "UpperHalfPoint":
        return cls(0, t)

    @property
    def z(self):
        return mp.mpc(self.x, self.y)

    @property
    def q_abs(self):
        return mp.exp(-2 * mp.pi * self.y)

    def __str__(self):
        return f"{mp.nstr(self.x, 17)}+{mp.nstr(self.y, 17)}i"
