"""Exact complex-rational arithmetic: Gaussian rationals, polynomials, rational functions.

The coefficient field is Q(i) with arbitrary-precision rational parts, so
orders, residues and partial fractions of the rational carriers are computed
exactly; floating point only enters when a value is finally evaluated.
"""

from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NonConvergence, NonRationalPole, ZeroDenominator, ZeroFunction

__all__ = [
    "GaussRat",
    "CPoly",
    "RationalFn",
    "INFINITY",
    "reduce",
    "derivative",
    "roots",
    "order_at",
    "residue_at",
    "antiderivative",
    "map_degree",
]


class _Infinity:
    """The point at infinity on the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __hash__(self):
        return hash("zmc-point-at-infinity")


INFINITY = _Infinity()


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float) and x == int(x):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GaussRat:
    """A Gaussian rational re + im*i with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussRat is immutable")

    @staticmethod
    def coerce(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        if isinstance(x, complex) and x.real == int(x.real) and x.imag == int(x.imag):
            return GaussRat(int(x.real), int(x.imag))
        raise TypeError(f"cannot coerce {x!r} to GaussRat")

    def __add__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussRat.coerce(other))

    def __rsub__(self, other):
        return GaussRat.coerce(other) + (-self)

    def __mul__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussRat.coerce(other)
        n2 = other.re * other.re + other.im * other.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero GaussRat")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / n2,
            (self.im * other.re - self.re * other.im) / n2,
        )

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|x|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


def rationalize(x: complex, max_den: int = 10**8) -> GaussRat | None:
    """Round a float complex to a nearby small-denominator GaussRat.

    Returns None when no convincing candidate exists (the caller decides
    whether that is an error).
    """
    re = Fraction(x.real).limit_denominator(max_den)
    im = Fraction(x.imag).limit_denominator(max_den)
    cand = GaussRat(re, im)
    err = abs(complex(cand) - complex(x))
    if err <= 1e-9 * max(1.0, abs(x)):
        return cand
    return None


class CPoly:
    """Polynomial over GaussRat, coefficients stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussRat.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("CPoly is immutable")

    @staticmethod
    def coerce(x) -> "CPoly":
        if isinstance(x, CPoly):
            return x
        if isinstance(x, (int, Fraction, GaussRat)):
            return CPoly([x])
        raise TypeError(f"cannot coerce {x!r} to CPoly")

    @staticmethod
    def monomial(k: int, coeff=GR_ONE) -> "CPoly":
        return CPoly([GR_ZERO] * k + [coeff])

    @staticmethod
    def from_roots(rts: Sequence) -> "CPoly":
        p = CPoly([GR_ONE])
        for r in rts:
            p = p * CPoly([-GaussRat.coerce(r), GR_ONE])
        return p

    @property
    def degree(self):
        """Degree; -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> GaussRat:
        if not self.coeffs:
            raise ZeroFunction("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other):
        other = CPoly.coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [GR_ZERO] * (n - len(self.coeffs))
        b = list(other.coeffs) + [GR_ZERO] * (n - len(other.coeffs))
        return CPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-CPoly.coerce(other))

    def __rsub__(self, other):
        return CPoly.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            g = GaussRat.coerce(other)
            return CPoly([c * g for c in self.coeffs])
        other = CPoly.coerce(other)
        if self.is_zero() or other.is_zero():
            return CPoly()
        out = [GR_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return CPoly(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = CPoly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = []
        rem = list(self.coeffs)
        dlead = other.leading()
        dd = len(other.coeffs) - 1
        while len(rem) - 1 >= dd and rem:
            c = rem[-1] / dlead
            k = len(rem) - 1 - dd
            q.append((k, c))
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
            while rem and rem[-1].is_zero():
                rem.pop()
        qc = [GR_ZERO] * (max((k for k, _ in q), default=-1) + 1)
        for k, c in q:
            qc[k] = c
        return CPoly(qc), CPoly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        try:
            other = CPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def monic(self) -> "CPoly":
        if self.is_zero():
            return self
        lead = self.leading()
        return CPoly([c / lead for c in self.coeffs])

    def derivative(self) -> "CPoly":
        return CPoly([c * k for k, c in enumerate(self.coeffs)][1:])

    def eval_exact(self, x) -> GaussRat:
        x = GaussRat.coerce(x)
        acc = GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, z):
        """Horner evaluation at complex floats (scalar or numpy array)."""
        if isinstance(z, (GaussRat, Fraction)) or (isinstance(z, int)):
            return self.eval_exact(z)
        acc = 0.0 + 0.0j
        if hasattr(z, "shape"):  # numpy array
            import numpy as np

            acc = np.zeros(z.shape, dtype=complex)
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def shift(self, a) -> "CPoly":
        """Exact composition p(z + a) via Horner on the binomial (z + a)."""
        a = GaussRat.coerce(a)
        res = CPoly()
        zpa = CPoly([a, GR_ONE])
        for c in reversed(self.coeffs):
            res = res * zpa + CPoly([c])
        return res

    def reversed_coeffs(self) -> "CPoly":
        """z^deg * p(1/z); for the w = 1/z chart."""
        return CPoly(list(reversed(self.coeffs)))

    def root_multiplicity(self, p) -> int:
        """Exact multiplicity of the root z = p (0 if not a root)."""
        p = GaussRat.coerce(p)
        if self.is_zero():
            raise ZeroFunction("zero polynomial")
        m = 0
        cur = self
        lin = CPoly([-p, GR_ONE])
        while cur.eval_exact(p).is_zero():
            cur, rem = divmod(cur, lin)
            if not rem.is_zero():
                raise AssertionError("exact deflation left a remainder")
            m += 1
            if cur.is_zero():
                break
        return m

    def __repr__(self):
        if self.is_zero():
            return "CPoly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                terms.append(f"{c}")
            elif k == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{k}")
        return "CPoly(" + " + ".join(terms) + ")"


def poly_gcd(a: CPoly, b: CPoly) -> CPoly:
    """Monic gcd by the Euclidean algorithm over Q(i)."""
    a, b = CPoly.coerce(a), CPoly.coerce(b)
    while not b.is_zero():
        r = a % b
        a, b = b, (r.monic() if not r.is_zero() else CPoly())
    if a.is_zero():
        return a
    return a.monic()


def square_free_decomposition(p: CPoly) -> list[tuple[CPoly, int]]:
    """Yun's algorithm: p = prod f_i^i with each f_i square-free, monic.

    Returns [(f_i, i)] for the nonconstant f_i only.
    """
    p = CPoly.coerce(p).monic()
    out: list[tuple[CPoly, int]] = []
    if p.degree < 1:
        return out
    d = p.derivative()
    c = poly_gcd(p, d)
    w = p // c
    z = (d // c) - w.derivative()
    i = 1
    while w.degree >= 1:
        g = poly_gcd(w, z)
        if g.degree >= 1:
            out.append((g, i))
        w = w // g
        z = (z // g) - w.derivative()
        i += 1
        if i > int(p.degree) + 2:
            raise NonConvergence("square-free decomposition did not terminate")
    return out


def _aberth(p: CPoly, tol: float, max_iter: int = 200) -> list[complex]:
    """Aberth-Ehrlich simultaneous iteration for a square-free polynomial."""
    n = int(p.degree)
    if n < 1:
        return []
    if n == 1:
        c0, c1 = complex(p.coeffs[0]), complex(p.coeffs[1])
        return [-c0 / c1]
    cs = [complex(c) for c in p.coeffs]
    lead = cs[-1]
    # Cauchy bound for the root radius
    radius = 1.0 + max(abs(c / lead) for c in cs[:-1])
    rng = random.Random(20240811)
    zs = [
        radius * 0.8 * cmath.exp(1j * (2 * math.pi * (k + 0.5) / n + 0.3))
        * (1 + 0.05 * rng.random())
        for k in range(n)
    ]
    dp = p.derivative()

    def backward_scale(z: complex) -> float:
        return sum(abs(c) * max(1.0, abs(z)) ** k for k, c in enumerate(cs))

    for _ in range(max_iter):
        done = True
        for i in range(n):
            zi = zs[i]
            pv = p(zi)
            if abs(pv) <= 0.01 * tol * backward_scale(zi):
                continue
            done = False
            dv = dp(zi)
            if dv == 0:
                zs[i] = zi * (1 + 1e-6) + 1e-6
                continue
            newton = pv / dv
            s = sum(1.0 / (zi - zs[j]) for j in range(n) if j != i)
            denom = 1.0 - newton * s
            if denom == 0:
                zs[i] = zi - newton
            else:
                zs[i] = zi - newton / denom
        if done:
            break
    else:
        for zi in zs:
            if abs(p(zi)) > tol * backward_scale(zi):
                raise NonConvergence("root iteration budget exhausted")
    return zs


def roots(p: CPoly, tol: float = 1e-12) -> list[tuple[complex, int]]:
    """Roots with exact multiplicities.

    Multiplicities come from the exact square-free decomposition; only the
    root positions within each square-free factor are numeric.
    """
    p = CPoly.coerce(p)
    if p.is_zero():
        raise ZeroFunction("cannot take roots of the zero polynomial")
    out: list[tuple[complex, int]] = []
    for factor, mult in square_free_decomposition(p):
        for z in _aberth(factor, tol):
            out.append((z, mult))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def rational_roots(p: CPoly) -> tuple[list[tuple[GaussRat, int]], CPoly]:
    """Split off all Gaussian-rational roots exactly.

    Returns (rational roots with multiplicity, the remaining factor).
    Numeric roots are rationalized and verified by exact evaluation.
    """
    p = CPoly.coerce(p)
    found: dict[GaussRat, int] = {}
    residual = p.monic()
    for z, mult in roots(p):
        cand = rationalize(z)
        if cand is None:
            continue
        if cand in found:
            continue
        if residual.eval_exact(cand).is_zero():
            m = residual.root_multiplicity(cand)
            found[cand] = m
            lin = CPoly([-cand, GR_ONE])
            for _ in range(m):
                residual = residual // lin
    return sorted(found.items(), key=lambda t: (t[0].re, t[0].im)), residual


class RationalFn:
    """Reduced ratio of CPoly with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=CPoly([GR_ONE]), _reduced=False):
        num = CPoly.coerce(num)
        den = CPoly.coerce(den)
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        if not _reduced:
            g = poly_gcd(num, den)
            if not g.is_zero() and g.degree >= 1:
                num = num // g
                den = den // g
            lead = den.leading()
            num = num * (GR_ONE / lead)
            den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFn is immutable")

    @staticmethod
    def coerce(x) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        return RationalFn(CPoly.coerce(x))

    @staticmethod
    def z() -> "RationalFn":
        return RationalFn(CPoly([GR_ZERO, GR_ONE]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = RationalFn.coerce(other)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other):
        return RationalFn.coerce(other) + (-self)

    def __mul__(self, other):
        other = RationalFn.coerce(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalFn.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalFn.coerce(other) / self

    def __eq__(self, other):
        try:
            other = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def reciprocal(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero")
        return RationalFn(self.den, self.num)

    def derivative(self) -> "RationalFn":
        n, d = self.num, self.den
        return RationalFn(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, z):
        if isinstance(z, (GaussRat, int, Fraction)):
            return self.eval_exact(z)
        return self.num(z) / self.den(z)

    def eval_exact(self, x) -> GaussRat:
        dv = self.den.eval_exact(x)
        if dv.is_zero():
            raise ZeroDivisionError(f"pole at {x!r}")
        return self.num.eval_exact(x) / dv

    def shift(self, a) -> "RationalFn":
        """r(z + a), exactly."""
        return RationalFn(self.num.shift(a), self.den.shift(a))

    def invert_variable(self) -> "RationalFn":
        """r(1/w) as an exact rational function of w."""
        dn = len(self.num.coeffs) - 1
        dd = len(self.den.coeffs) - 1
        if self.is_zero():
            return self
        rn = self.num.reversed_coeffs()
        rd = self.den.reversed_coeffs()
        if dd >= dn:
            rn = rn * CPoly.monomial(dd - dn)
        else:
            rd = rd * CPoly.monomial(dn - dd)
        return RationalFn(rn, rd)

    def order_at(self, p) -> int:
        """Exact order of vanishing at p (negative for a pole); p may be INFINITY."""
        if self.is_zero():
            raise ZeroFunction("order of the zero function is undefined")
        if p is INFINITY:
            return int(self.den.degree) - int(self.num.degree)
        p = GaussRat.coerce(p)
        mn = self.num.root_multiplicity(p)
        if mn:
            return mn
        return -self.den.root_multiplicity(p)

    def residue_at(self, p) -> GaussRat:
        """Exact residue (coefficient of (z-p)^-1) at a finite point."""
        p = GaussRat.coerce(p)
        m = self.den.root_multiplicity(p)
        if m == 0:
            return GR_ZERO
        lin = CPoly([-p, GR_ONE])
        e = self.den
        for _ in range(m):
            e = e // lin
        series = _taylor_quotient(self.num.shift(p), e.shift(p), m)
        return series[m - 1]

    def taylor_at(self, p, k: int) -> list[GaussRat]:
        """First k Taylor coefficients at a finite regular point p."""
        p = GaussRat.coerce(p)
        if self.den.eval_exact(p).is_zero():
            raise ZeroDivisionError("Taylor expansion at a pole")
        return _taylor_quotient(self.num.shift(p), self.den.shift(p), k)

    def map_degree(self) -> int:
        """Degree as a map of the Riemann sphere."""
        if self.is_zero():
            return 0
        return max(int(self.num.degree), int(self.den.degree))

    def antiderivative(self) -> tuple["RationalFn", list[tuple[GaussRat, GaussRat]]]:
        """Exact primitive: rational part plus log terms.

        Returns (R, [(pole, log coefficient)]) such that the derivative of R
        plus sum of c/(z-pole) reproduces this function exactly. The rational
        part's polynomial piece has zero constant term. Raises
        NonRationalPole when a pole is not a Gaussian rational.
        """
        q, rem = divmod(self.num, self.den)
        poly_int = CPoly([GR_ZERO] + [c / (k + 1) for k, c in enumerate(q.coeffs)])
        if rem.is_zero():
            return RationalFn(poly_int), []
        rat_poles, residual = rational_roots(self.den)
        if residual.degree >= 1:
            raise NonRationalPole(
                f"denominator factor of degree {residual.degree} has no Gaussian-rational roots"
            )
        proper = RationalFn(rem, self.den)
        rat_part = RationalFn(poly_int)
        logs: list[tuple[GaussRat, GaussRat]] = []
        for pole, m in rat_poles:
            lin = CPoly([-pole, GR_ONE])
            e = self.den
            for _ in range(m):
                e = e // lin
            series = _taylor_quotient(rem.shift(pole), e.shift(pole), m)
            # series[t] is the coefficient of (z-pole)^(t-m)
            for t in range(m):
                c = series[t]
                if c.is_zero():
                    continue
                j = m - t  # pole order of this term
                if j == 1:
                    logs.append((pole, c))
                else:
                    # integral of c*(z-p)^(-j) = -c/((j-1) (z-p)^(j-1))
                    denp = CPoly([GR_ONE])
                    for _ in range(j - 1):
                        denp = denp * lin
                    rat_part = rat_part + RationalFn(
                        CPoly([-c / (j - 1)]), denp
                    )
        # verify by differentiating back
        back = rat_part.derivative()
        for pole, c in logs:
            back = back + RationalFn(CPoly([c]), CPoly([-pole, GR_ONE]))
        if back != self:
            raise AssertionError("antiderivative verification failed")
        logs.sort(key=lambda t: (t[0].re, t[0].im))
        return rat_part, logs

    def __repr__(self):
        if self.den == CPoly([GR_ONE]):
            return f"RationalFn({self.num!r})"
        return f"RationalFn({self.num!r} / {self.den!r})"


def _taylor_quotient(n: CPoly, e: CPoly, k: int) -> list[GaussRat]:
    """First k coefficients of the power series n(w)/e(w), e(0) != 0."""
    e0 = e.coeffs[0] if e.coeffs else GR_ZERO
    if e0.is_zero():
        raise ZeroDivisionError("series division by w-multiple")
    ncs = list(n.coeffs) + [GR_ZERO] * k
    ecs = list(e.coeffs) + [GR_ZERO] * k
    out = []
    for t in range(k):
        acc = ncs[t]
        for j in range(1, t + 1):
            acc = acc - ecs[j] * out[t - j]
        out.append(acc / e0)
    return out


# --- module-level operation aliases ---------------------------------------


def reduce(num, den) -> RationalFn:
    """Reduced rational function num/den with monic denominator."""
    return RationalFn(num, den)


def derivative(r: RationalFn) -> RationalFn:
    return RationalFn.coerce(r).derivative()


def order_at(r: RationalFn, p) -> int:
    return RationalFn.coerce(r).order_at(p)


def residue_at(r: RationalFn, p) -> GaussRat:
    return RationalFn.coerce(r).residue_at(p)


def antiderivative(r: RationalFn):
    return RationalFn.coerce(r).antiderivative()


def map_degree(r: RationalFn) -> int:
    return RationalFn.coerce(r).map_degree()
