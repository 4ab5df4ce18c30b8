"""Weierstrass P-function on the square torus C/(Z + Zi) and expression trees.

Evaluation reduces the argument to the centered fundamental cell, then uses
the Laurent series about the origin close to the lattice and an
Eisenstein-corrected lattice sum elsewhere.  The lattice invariants come
from the rapidly converging q-expansions of the weight-4 and weight-6
Eisenstein series (q = e^{-2 pi}, so the truncation tail is far below
1e-12).
"""

from __future__ import annotations

import functools
import math
from typing import Optional

import numpy as np

from .errors import DivisionUnderflow, PoleProximity, ZmcError

__all__ = [
    "SquareLattice",
    "lattice",
    "wp",
    "wp_prime",
    "wp_both",
    "invariants",
    "eval_expr",
    "reduce_to_cell",
    "MeroExpr",
    "EXPR_Z",
    "EXPR_WP",
    "EXPR_WPP",
    "const_expr",
    "split_fraction",
]

# The Laurent series about a lattice point converges for |z| < 1 (the nearest
# other pole); after cell reduction |z| <= sqrt(2)/2, so the series covers the
# whole cell with term ratio <= 1/2.  The Eisenstein-corrected lattice sum is
# kept as an independent evaluation route for cross-checks.
SERIES_RADIUS = 0.75
SHELLS = 40
N_SERIES = 90
POLE_TOL = 1e-12


def _sigma_power(k: int, n: int) -> int:
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d**k
            e = n // d
            if e != d:
                s += e**k
        d += 1
    return s


class SquareLattice:
    """Invariants and evaluation tables for the lattice Z + Zi."""

    def __init__(self):
        q = math.exp(-2 * math.pi)
        e4 = 1.0 + 240.0 * sum(_sigma_power(3, n) * q**n for n in range(1, 40))
        e6 = 1.0 - 504.0 * sum(_sigma_power(5, n) * q**n for n in range(1, 40))
        zeta4 = math.pi**4 / 90.0
        zeta6 = math.pi**6 / 945.0
        self.g2 = 60.0 * 2.0 * zeta4 * e4
        self.g3 = 140.0 * 2.0 * zeta6 * e6
        if abs(self.g3) > 1e-10:
            raise ZmcError("square-lattice symmetry violated: g3 != 0")
        if not (self.g2.real > 0):
            raise ZmcError("g2 must be real positive on the square lattice")

        # Laurent coefficients of wp at 0: wp = z^-2 + sum_{k>=2} c_k z^{2k-2}
        c = np.zeros(N_SERIES + 1)
        c[2] = self.g2 / 20.0
        c[3] = self.g3 / 28.0
        for k in range(4, N_SERIES + 1):
            s = sum(c[m] * c[k - m] for m in range(2, k - 1))
            c[k] = 3.0 * s / ((2 * k + 1) * (k - 3))
        self.series_c = c

        # lattice points of the truncated sum, max(|m|,|n|) <= SHELLS
        pts = []
        for m in range(-SHELLS, SHELLS + 1):
            for n in range(-SHELLS, SHELLS + 1):
                if m == 0 and n == 0:
                    continue
                pts.append(complex(m, n))
        self.lattice_pts = np.array(pts, dtype=complex)
        inv2 = 1.0 / (self.lattice_pts**2)
        self.lattice_inv2 = inv2

        # Eisenstein tail corrections: T_m = G_m - partial sum, m = 4,8,12,16
        # G_{2k} = c_k / (2k - 1)
        self.tails = {}
        for m in (4, 8, 12, 16):
            g_m = c[m // 2] / (2 * (m // 2) - 1)
            s_m = np.sum(self.lattice_pts ** (-float(m))).real
            self.tails[m] = g_m - s_m

    # --- evaluation ------------------------------------------------------

    def reduce_to_cell(self, z):
        """Translate by lattice vectors into the centered cell [-1/2,1/2]^2."""
        z = np.asarray(z, dtype=complex)
        return z - np.round(z.real) - 1j * np.round(z.imag)

    def wp_both(self, z, method: str = "auto"):
        """Evaluate (wp, wp') together; scalar in, scalar out.

        method: "auto" (series within SERIES_RADIUS, corrected lattice sum
        beyond), "series", or "sum" to force one route.
        """
        scalar = np.isscalar(z) or getattr(z, "shape", ()) == ()
        zr = self.reduce_to_cell(np.atleast_1d(np.asarray(z, dtype=complex)))
        dist = np.abs(zr)
        if np.any(dist <= POLE_TOL):
            raise PoleProximity("evaluation point is on (or too near) the lattice")
        p = np.empty(zr.shape, dtype=complex)
        pp = np.empty(zr.shape, dtype=complex)
        if method == "series":
            near = np.ones(zr.shape, dtype=bool)
        elif method == "sum":
            near = np.zeros(zr.shape, dtype=bool)
        else:
            near = dist <= SERIES_RADIUS
        if np.any(near):
            p[near], pp[near] = self._series(zr[near])
        far = ~near
        if np.any(far):
            p[far], pp[far] = self._lattice_sum(zr[far])
        if scalar:
            return complex(p[0]), complex(pp[0])
        return p, pp

    def _series(self, zr):
        c = self.series_c
        t = zr * zr
        h = np.zeros(zr.shape, dtype=complex)   # sum c_k t^{k-1}
        h2 = np.zeros(zr.shape, dtype=complex)  # sum (2k-2) c_k t^{k-2}
        for k in range(N_SERIES, 1, -1):
            h = h * t + c[k]
            h2 = h2 * t + (2 * k - 2) * c[k]
        h = h * t
        p = 1.0 / t + h
        pp = -2.0 / (t * zr) + zr * h2
        return p, pp

    def _lattice_sum(self, zr):
        out_p = np.empty(zr.shape, dtype=complex)
        out_pp = np.empty(zr.shape, dtype=complex)
        chunk = max(1, 3_000_000 // self.lattice_pts.size)
        for lo in range(0, zr.size, chunk):
            hi = min(lo + chunk, zr.size)
            zc = zr[lo:hi, None]
            d = zc - self.lattice_pts[None, :]
            i2 = 1.0 / (d * d)
            out_p[lo:hi] = 1.0 / (zc[:, 0] ** 2) + np.sum(i2 - self.lattice_inv2[None, :], axis=1)
            out_pp[lo:hi] = -2.0 / (zc[:, 0] ** 3) - 2.0 * np.sum(i2 / d, axis=1)
        t4, t8, t12, t16 = (self.tails[m] for m in (4, 8, 12, 16))
        z2 = zr * zr
        z4 = z2 * z2
        out_p += z2 * (3 * t4 + z4 * (7 * t8 + z4 * (11 * t12 + z4 * 15 * t16)))
        out_pp += zr * (6 * t4 + z4 * (42 * t8 + z4 * (110 * t12 + z4 * 210 * t16)))
        return out_p, out_pp


@functools.lru_cache(maxsize=1)
def lattice() -> SquareLattice:
    return SquareLattice()


def reduce_to_cell(z):
    return lattice().reduce_to_cell(z)


def wp_both(z, method: str = "auto"):
    return lattice().wp_both(z, method=method)


def wp(z):
    return lattice().wp_both(z)[0]


def wp_prime(z):
    return lattice().wp_both(z)[1]


def invariants() -> tuple[float, float]:
    """(g2, g3) of the square lattice."""
    lat = lattice()
    return lat.g2, lat.g3


def eval_expr(e: "MeroExpr", z, ctx: Optional[dict] = None):
    """Evaluate an expression tree at z (scalar or array)."""
    return e.eval(z, ctx=ctx)


# --- expression trees -------------------------------------------------------


class MeroExpr:
    """Expression tree over z, wp(z), wp'(z) and complex constants.

    Derivatives are eliminated structurally: wp'' rewrites through the
    differentiated Weierstrass equation as 6 wp^2 - g2/2, so trees only ever
    contain the two elliptic leaves.
    """

    op = "?"

    def eval(self, z, ctx: Optional[dict] = None):
        scalar = np.isscalar(z) or getattr(z, "shape", ()) == ()
        za = np.atleast_1d(np.asarray(z, dtype=complex))
        if ctx is None:
            ctx = {}
        val = self._eval(za, ctx)
        val = np.broadcast_to(np.asarray(val, dtype=complex), za.shape)
        if scalar:
            v = complex(val[0])
            return v
        return np.array(val)

    def _eval(self, z, ctx):
        raise NotImplementedError

    def derivative(self) -> "MeroExpr":
        raise NotImplementedError

    # light algebra with constant folding
    def __add__(self, other):
        return _add(self, _coerce(other))

    def __radd__(self, other):
        return _add(_coerce(other), self)

    def __sub__(self, other):
        return _sub(self, _coerce(other))

    def __rsub__(self, other):
        return _sub(_coerce(other), self)

    def __mul__(self, other):
        return _mul(self, _coerce(other))

    def __rmul__(self, other):
        return _mul(_coerce(other), self)

    def __truediv__(self, other):
        return _div(self, _coerce(other))

    def __rtruediv__(self, other):
        return _div(_coerce(other), self)

    def __neg__(self):
        return _mul(const_expr(-1.0), self)

    def __pow__(self, n: int):
        return _pow(self, n)


class _Z(MeroExpr):
    op = "z"

    def _eval(self, z, ctx):
        return z

    def derivative(self):
        return const_expr(1.0)

    def __repr__(self):
        return "z"


class _WP(MeroExpr):
    op = "wp"

    def _eval(self, z, ctx):
        key = id(z)
        hit = ctx.get(key)
        if hit is None:
            hit = wp_both(z)
            ctx[key] = hit
        return hit[0]

    def derivative(self):
        return EXPR_WPP

    def __repr__(self):
        return "wp(z)"


class _WPP(MeroExpr):
    op = "wpp"

    def _eval(self, z, ctx):
        key = id(z)
        hit = ctx.get(key)
        if hit is None:
            hit = wp_both(z)
            ctx[key] = hit
        return hit[1]

    def derivative(self):
        # wp'' = 6 wp^2 - g2/2
        g2, _ = invariants()
        return const_expr(6.0) * (EXPR_WP**2) - const_expr(g2 / 2.0)

    def __repr__(self):
        return "wp'(z)"


class _Const(MeroExpr):
    op = "const"

    def __init__(self, value: complex):
        self.value = complex(value)

    def _eval(self, z, ctx):
        return np.full(z.shape, self.value, dtype=complex)

    def derivative(self):
        return const_expr(0.0)

    def __repr__(self):
        return repr(self.value)


class _BinOp(MeroExpr):
    def __init__(self, a: MeroExpr, b: MeroExpr):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"({self.a!r} {self.op} {self.b!r})"


class _Add(_BinOp):
    op = "+"

    def _eval(self, z, ctx):
        return self.a._eval(z, ctx) + self.b._eval(z, ctx)

    def derivative(self):
        return _add(self.a.derivative(), self.b.derivative())


class _Sub(_BinOp):
    op = "-"

    def _eval(self, z, ctx):
        return self.a._eval(z, ctx) - self.b._eval(z, ctx)

    def derivative(self):
        return _sub(self.a.derivative(), self.b.derivative())


class _Mul(_BinOp):
    op = "*"

    def _eval(self, z, ctx):
        return self.a._eval(z, ctx) * self.b._eval(z, ctx)

    def derivative(self):
        return _add(
            _mul(self.a.derivative(), self.b), _mul(self.a, self.b.derivative())
        )


class _Div(_BinOp):
    op = "/"

    def _eval(self, z, ctx):
        num = self.a._eval(z, ctx)
        den = self.b._eval(z, ctx)
        if num.ndim == 0 or den.ndim == 0 or num.size == 1:
            d = np.atleast_1d(den)
            if np.any(np.abs(d) < 1e-280):
                raise DivisionUnderflow("denominator underflow in expression tree")
        return num / den

    def derivative(self):
        return _div(
            _sub(
                _mul(self.a.derivative(), self.b), _mul(self.a, self.b.derivative())
            ),
            _mul(self.b, self.b),
        )


class _Pow(MeroExpr):
    op = "^"

    def __init__(self, a: MeroExpr, n: int):
        self.a = a
        self.n = int(n)

    def _eval(self, z, ctx):
        return self.a._eval(z, ctx) ** self.n

    def derivative(self):
        if self.n == 0:
            return const_expr(0.0)
        return _mul(
            _mul(const_expr(self.n), _pow(self.a, self.n - 1)), self.a.derivative()
        )

    def __repr__(self):
        return f"({self.a!r})^{self.n}"


EXPR_Z = _Z()
EXPR_WP = _WP()
EXPR_WPP = _WPP()


def const_expr(v) -> MeroExpr:
    return _Const(v)


def _coerce(x) -> MeroExpr:
    if isinstance(x, MeroExpr):
        return x
    return const_expr(x)


def _is_const(e: MeroExpr, v=None) -> bool:
    if not isinstance(e, _Const):
        return False
    return True if v is None else e.value == v


def _add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return const_expr(a.value + b.value)
    return _Add(a, b)


def _sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return const_expr(a.value - b.value)
    return _Sub(a, b)


def _mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return const_expr(0.0)
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return const_expr(a.value * b.value)
    return _Mul(a, b)


def _div(a, b):
    if _is_const(a, 0):
        return const_expr(0.0)
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        if b.value == 0:
            raise ZeroDivisionError("constant division by zero in expression")
        return const_expr(a.value / b.value)
    return _Div(a, b)


def _pow(a, n):
    n = int(n)
    if n == 0:
        return const_expr(1.0)
    if n == 1:
        return a
    if n < 0:
        return _div(const_expr(1.0), _Pow(a, -n))
    if _is_const(a):
        return const_expr(a.value**n)
    return _Pow(a, n)


def split_fraction(e: MeroExpr) -> tuple[MeroExpr, MeroExpr]:
    """Numerator/denominator split when the root is a quotient."""
    if isinstance(e, _Div):
        return e.a, e.b
    return e, const_expr(1.0)
