"""Quadrature rules used by the eigenfunction evaluators and the Hankel oracle.

Two rules live here:

* `TanhSinh01`: double-exponential rule on (0, 1] with cached kernel values,
  so a Laplace-type integral  int_0^1 K(t) exp(-pi x t) dt  over many x costs
  only one exponential per node after the first call.
* `gauss_kronrod`: adaptive G7/K15 bisection with the embedded estimate.
"""
from __future__ import annotations

import mpmath as mp

__all__ = ["QuadratureError", "TanhSinh01", "gauss_kronrod", "MAX_DEPTH"]

MAX_DEPTH = 40


class QuadratureError(ArithmeticError):
    """Requested tolerance not reached within the refinement limit."""


class TanhSinh01:
    """Tanh-sinh rule on (0, 1] for integrands K(t) * w(t).

    Node u maps to t = 1 / (1 + exp(-pi sinh u)), which keeps full relative
    accuracy at both ends.  Level L uses step 2^-L; its nodes are a superset
    of level L-1, and kernel values are shared through a dict keyed by the
    node position on the finest grid.
    """

    def __init__(self, kernel, dps: int, max_level: int = 10):
        self.kernel = kernel
        self.dps = dps
        self.max_level = max_level
        with mp.workdps(dps):
            self.u_max = mp.asinh((dps + 5) * mp.log(10) / mp.pi) + mp.mpf(0.5)
        self._values = {}
        self._levels = {}

    def _node(self, k, level):
        h = mp.ldexp(1, -level)
        u = k * h
        e = mp.exp(-mp.pi * mp.sinh(u))
        t = 1 / (1 + e)
        # dt/du = pi cosh(u) e / (1 + e)^2
        w = mp.pi * mp.cosh(u) * e / (1 + e) ** 2
        return t, h * w

    def level(self, L):
        """Nodes, scaled weights and kernel values of level L."""
        got = self._levels.get(L)
        if got is not None:
            return got
        with mp.workdps(self.dps):
            kmax = int(mp.ceil(self.u_max * 2 ** L))
            ts, ws, ks = [], [], []
            shift = self.max_level - L
            for k in range(-kmax, kmax + 1):
                t, w = self._node(k, L)
                if t == 0 or w == 0:
                    continue
                key = k << shift
                kv = self._values.get(key)
                if kv is None:
                    kv = self.kernel(t)
                    self._values[key] = kv
                ts.append(t)
                ws.append(w)
                ks.append(kv)
        got = (ts, ws, ks)
        self._levels[L] = got
        return got

    def integrate(self, weight, tol, start_level: int = 3):
        """int_0^1 K(t) weight(t) dt -> (value, err estimate).

        The estimate is the change between the last two levels.
        """
        prev = None
        with mp.workdps(self.dps):
            for L in range(start_level, self.max_level + 1):
                ts, ws, ks = self.level(L)
                s = mp.fsum(w * kv * weight(t) for t, w, kv in zip(ts, ws, ks))
                if prev is not None:
                    err = abs(s - prev)
                    if err <= tol:
                        return s, err
                prev = s
        raise QuadratureError(
            f"tanh-sinh did not reach {mp.nstr(tol, 3)} by level {self.max_level}")


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = [
    "0.991455371120812639206854697526329", "0.949107912342758524526189684047851",
    "0.864864423359769072789712788640926", "0.741531185599394439863864773280788",
    "0.586087235467691130294144845693013", "0.405845151377397166906606412076961",
    "0.207784955007898467600689403773245", "0",
]
_WGK = [
    "0.022935322010529224963732008058970", "0.063092092629978553290700663189204",
    "0.104790010322250183839876322541518", "0.140653259715525918745189590510238",
    "0.169004726639267902826583426598550", "0.190350578064785409913256402421014",
    "0.204432940075298892414161999234649", "0.209482141084727828012999174891714",
]
_WG = [
    "0.129484966168869693270611432679082", "0.279705391489276667901467771423780",
    "0.381830050505118944950369775488975", "0.417959183673469387755102040816327",
]


_GK_CACHE = {}


def _gk_constants():
    got = _GK_CACHE.get(mp.mp.prec)
    if got is None:
        got = tuple([mp.mpf(v) for v in tab] for tab in (_XGK, _WGK, _WG))
        _GK_CACHE[mp.mp.prec] = got
    return got


def _gk15(f, a, b):
    xgk, wgk, wg = _gk_constants()
    c = (a + b) / 2
    h = (b - a) / 2
    fc = f(c)
    k = wgk[7] * fc
    g = wg[3] * fc
    for j in range(7):
        dx = h * xgk[j]
        s = f(c - dx) + f(c + dx)
        k += wgk[j] * s
        if j % 2 == 1:
            g += wg[j // 2] * s
    return k * h, abs((k - g) * h)


def gauss_kronrod(f, a, b, tol, depth: int = 0, max_depth: int = MAX_DEPTH):
    """Adaptive G7/K15 integral of f over [a, b] -> (value, err).

    Intervals are bisected until |K15 - G7| is below their share of `tol`.
    """
    val, err = _gk15(f, a, b)
    if err <= tol:
        return val, err
    if depth >= max_depth:
        raise QuadratureError(
            f"Gauss-Kronrod stuck at [{mp.nstr(a, 8)}, {mp.nstr(b, 8)}] "
            f"with err {mp.nstr(err, 3)} > {mp.nstr(tol, 3)}")
    m = (a + b) / 2
    v1, e1 = gauss_kronrod(f, a, m, tol / 2, depth + 1, max_depth)
    v2, e2 = gauss_kronrod(f, m, b, tol / 2, depth + 1, max_depth)
    return v1 + v2, e1 + e2
