"""Local analysis of meromorphic data: orders, residues, Laurent jets, degree.

Every quantity has two routes: exact (rational carriers) and numeric
(Cauchy integrals on circles, trapezoid rule, spectrally accurate).  The
numeric route works for any carrier and doubles as the independent oracle
for the exact one.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import elliptic
from .cxpoly import INFINITY, CPoly, GaussRat, RationalFn, roots
from .elliptic import MeroExpr, split_fraction
from .errors import (
    JetAmbiguous,
    NonConvergence,
    NotNearInteger,
    RadiusTooSmall,
    ZeroFunction,
)

__all__ = [
    "DomainSpec",
    "MeroFn",
    "LaurentJet",
    "order_of_form_at",
    "order_of_fn_at",
    "laurent_jet",
    "residue_numeric",
    "degree_numeric",
    "total_curvature",
    "point_to_complex",
    "points_equal",
]

Point = Union[GaussRat, complex, type(INFINITY)]

_LEAD_REL_THRESHOLD = 1e-8
_AMBIGUITY_MARGIN = 1e3


def point_to_complex(p: Point) -> complex:
    if p is INFINITY:
        raise ValueError("the point at infinity has no complex coordinate")
    if isinstance(p, GaussRat):
        return complex(p)
    return complex(p)


def points_equal(a: Point, b: Point, tol: float = 1e-9, torus: bool = False) -> bool:
    if (a is INFINITY) or (b is INFINITY):
        return a is b
    if isinstance(a, GaussRat) and isinstance(b, GaussRat) and not torus:
        return a == b
    d = point_to_complex(a) - point_to_complex(b)
    if torus:
        d = complex(elliptic.reduce_to_cell(d))
    return abs(d) < tol


@dataclass(frozen=True)
class DomainSpec:
    """Compactified domain (sphere or square torus) with punctures."""

    kind: str  # "sphere" | "torus"
    punctures: tuple = ()

    def __post_init__(self):
        if self.kind not in ("sphere", "torus"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "punctures", tuple(self.punctures))
        for i, p in enumerate(self.punctures):
            for q in self.punctures[i + 1:]:
                if points_equal(p, q, torus=self.kind == "torus"):
                    raise ValueError("punctures must be pairwise distinct")
        if self.kind == "torus" and any(p is INFINITY for p in self.punctures):
            raise ValueError("the torus has no point at infinity")

    @property
    def euler_characteristic(self) -> int:
        return 2 if self.kind == "sphere" else 0

    def finite_punctures(self):
        return [p for p in self.punctures if p is not INFINITY]

    def has_infinity(self) -> bool:
        return any(p is INFINITY for p in self.punctures)


class MeroFn:
    """Meromorphic function carried exactly (rational) or as an elliptic tree."""

    def __init__(self, carrier):
        if not isinstance(carrier, (RationalFn, MeroExpr)):
            raise TypeError("carrier must be a RationalFn or a MeroExpr")
        self.carrier = carrier

    @property
    def is_exact(self) -> bool:
        return isinstance(self.carrier, RationalFn)

    def rational(self) -> RationalFn:
        if not self.is_exact:
            raise TypeError("carrier is not rational")
        return self.carrier

    def eval(self, z, ctx: Optional[dict] = None):
        if self.is_exact:
            return self.carrier(z)
        return self.carrier.eval(z, ctx=ctx)

    def __call__(self, z, ctx: Optional[dict] = None):
        return self.eval(z, ctx=ctx)

    def derivative(self) -> "MeroFn":
        return MeroFn(self.carrier.derivative())

    def is_zero(self) -> bool:
        return self.is_exact and self.carrier.is_zero()

    def __mul__(self, other: "MeroFn") -> "MeroFn":
        if self.is_exact and other.is_exact:
            return MeroFn(self.carrier * other.carrier)
        if not self.is_exact and not other.is_exact:
            return MeroFn(self.carrier * other.carrier)
        raise TypeError("cannot mix exact and elliptic carriers")

    def numerator_denominator(self):
        """Split into (num, den) evaluators for pole-free densities."""
        if self.is_exact:
            return self.carrier.num, self.carrier.den
        return split_fraction(self.carrier)

    def __repr__(self):
        tag = "exact" if self.is_exact else "elliptic"
        return f"MeroFn[{tag}]({self.carrier!r})"


@dataclass
class LaurentJet:
    """Truncated Laurent expansion at a point in its local chart."""

    center: object
    lead_order: int
    coeffs: np.ndarray
    radius: float

    def coefficient(self, n: int) -> complex:
        """c_n, zero when n precedes the leading order or exceeds the jet."""
        idx = n - self.lead_order
        if idx < 0 or idx >= len(self.coeffs):
            return 0.0 + 0.0j
        return complex(self.coeffs[idx])

    @property
    def residue(self) -> complex:
        return self.coefficient(-1)


# --- local chart evaluators --------------------------------------------------


def _local_evaluator(f: MeroFn, p: Point, form: bool):
    """Returns ev(zeta_array) for f in the local chart at p.

    At infinity the chart is w = 1/z; a 1-form picks up the factor -w^{-2}.
    """
    if p is INFINITY:
        if form:
            return lambda w: -f.eval(1.0 / w) / (w * w)
        return lambda w: f.eval(1.0 / w)
    p0 = point_to_complex(p)
    return lambda zeta: f.eval(p0 + zeta)


def _pole_locations(f: MeroFn) -> list[complex]:
    if f.is_exact:
        den = f.rational().den
        if den.degree >= 1:
            return [z for z, _ in roots(den)]
        return []
    return []  # elliptic: poles handled through punctures/avoid lists


def _nearest_special_distance(f: MeroFn, p: Point, dom: DomainSpec,
                              avoid: Sequence[Point] = ()) -> float:
    """Distance from p (in its local chart) to the nearest other singularity."""
    specials: list[complex] = []
    torus = dom.kind == "torus"

    def chart(q: complex) -> complex | None:
        if p is INFINITY:
            return None if q == 0 else 1.0 / q
        return q - point_to_complex(p)

    candidates: list[complex] = []
    for q in list(dom.punctures) + list(avoid):
        if points_equal(p, q, torus=torus):
            continue
        if q is INFINITY:
            continue
        candidates.append(point_to_complex(q))
    candidates.extend(z for z in _pole_locations(f)
                      if not points_equal(p, z, torus=torus))
    if not f.is_exact:
        # wp poles live on the lattice
        if not (p is INFINITY):
            base = point_to_complex(p)
            near_lattice = complex(np.round(base.real)) + 1j * complex(np.round(base.imag))
            for dm in (-1, 0, 1):
                for dn in (-1, 0, 1):
                    q = near_lattice + dm + 1j * dn
                    if not points_equal(p, q, torus=torus):
                        candidates.append(q)
    dists = []
    for q in candidates:
        if torus:
            d = abs(complex(elliptic.reduce_to_cell(q - point_to_complex(p))))
            if d > 1e-14:
                dists.append(d)
            continue
        loc = chart(q)
        if loc is None:
            continue
        dists.append(abs(loc))
    if p is INFINITY:
        # punctures crowd near w=0 only if they are huge in z; also keep w <= 1
        dists.append(1.0)
    if not dists:
        return 0.5
    return min(dists)


def laurent_jet(f: MeroFn, p: Point, depth: int, dom: DomainSpec,
                form: bool = False, avoid: Sequence[Point] = (),
                radius: Optional[float] = None) -> LaurentJet:
    """Laurent coefficients at p by trapezoid Cauchy integrals on a circle.

    The circle radius stays below 0.45 times the distance to the nearest
    other singularity; the node count doubles until two passes agree.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if radius is None:
        dmin = _nearest_special_distance(f, p, dom, avoid)
        if dmin < 1e-8:
            raise RadiusTooSmall(f"singularities within {dmin:.2e} of {p!r}")
        radius = min(0.45 * dmin, 0.5)
    ev = _local_evaluator(f, p, form)

    prev = None
    m = 256
    while m <= 8192:
        theta = 2.0 * np.pi * np.arange(m) / m
        samples = np.asarray(ev(radius * np.exp(1j * theta)), dtype=complex)
        scaled = np.fft.fft(samples) / m  # scaled[n] ~ c_n * radius^n (aliased)
        ns = np.fft.fftfreq(m, d=1.0 / m).astype(int)  # signed orders
        mags = np.abs(scaled)
        mags[np.abs(ns) > m // 3] = 0.0  # aliasing zone carries no usable orders
        top = float(np.max(mags))
        if top == 0.0:
            raise ZeroFunction("function vanishes identically on the test circle")
        thresh = _LEAD_REL_THRESHOLD * top
        significant = ns[mags >= thresh]
        lead = int(np.min(significant))
        below = ns[(mags < thresh) & (mags > thresh / _AMBIGUITY_MARGIN)]
        if below.size and int(np.min(below)) < lead:
            raise JetAmbiguous(
                f"leading order at {p!r} not separated from order {int(np.min(below))}"
            )
        wanted = np.arange(lead, lead + depth)
        idx = np.mod(wanted, m)
        coeffs = scaled[idx] / (radius ** wanted.astype(float))
        if prev is not None:
            prev_lead, prev_coeffs = prev
            if prev_lead == lead:
                scale = max(1.0, float(np.max(np.abs(coeffs))))
                if np.max(np.abs(coeffs - prev_coeffs)) <= 1e-10 * scale:
                    return LaurentJet(p, lead, coeffs, radius)
        prev = (lead, coeffs)
        m *= 2
    raise NonConvergence(f"Laurent jet at {p!r} did not stabilize")


def residue_numeric(f: MeroFn, p: Point, dom: DomainSpec,
                    form: bool = False, avoid: Sequence[Point] = ()) -> complex:
    """c_{-1} of the (form-aware) jet; 0 at regular points."""
    jet = laurent_jet(f, p, max(4, 2), dom, form=form, avoid=avoid)
    return jet.residue


def order_of_form_at(omega: MeroFn, p: Point, dom: DomainSpec,
                     avoid: Sequence[Point] = ()) -> int:
    """Order of the 1-form omega-hat dz at p (w-chart transform at infinity)."""
    if omega.is_zero():
        raise ZeroFunction("zero form has no order")
    if omega.is_exact:
        r = omega.rational()
        if p is INFINITY:
            return r.invert_variable().order_at(GaussRat(0)) - 2
        if isinstance(p, GaussRat):
            return r.order_at(p)
    jet = laurent_jet(omega, p, 2, dom, form=True, avoid=avoid)
    return jet.lead_order


def order_of_fn_at(f: MeroFn, p: Point, dom: DomainSpec,
                   avoid: Sequence[Point] = ()) -> int:
    """Order of a meromorphic function at p (no chart factor at infinity)."""
    if f.is_zero():
        raise ZeroFunction("zero function has no order")
    if f.is_exact:
        r = f.rational()
        if p is INFINITY:
            return r.invert_variable().order_at(GaussRat(0))
        if isinstance(p, GaussRat):
            return r.order_at(p)
    jet = laurent_jet(f, p, 2, dom, form=False, avoid=avoid)
    return jet.lead_order


def residue_of_form_at(omega: MeroFn, p: Point, dom: DomainSpec,
                       exact: bool = True, avoid: Sequence[Point] = ()):
    """Residue of the form at p; exact Gaussian rational when possible."""
    if omega.is_exact and exact:
        r = omega.rational()
        if p is INFINITY:
            s = r.invert_variable() * RationalFn(CPoly([-1]), CPoly([0, 0, 1]))
            return s.residue_at(GaussRat(0))
        if isinstance(p, GaussRat):
            return r.residue_at(p)
    return residue_numeric(omega, p, dom, form=True, avoid=avoid)


# --- mapping degree by total curvature ---------------------------------------


def _density_from_nd(nv, dv, wv):
    """Fubini-Study pullback density 4|W|^2/(2|d|^2+|n|^2)^2, W = n'd - nd'."""
    return 4.0 * np.abs(wv) ** 2 / (2.0 * np.abs(dv) ** 2 + np.abs(nv) ** 2) ** 2


def _sphere_chart_integral(num: CPoly, den: CPoly, n_r: int = 96,
                           n_theta: int = 256) -> float:
    w = num.derivative() * den - num * den.derivative()
    xs, ws = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (xs + 1.0)
    wr = 0.5 * ws
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    zgrid = r[:, None] * np.exp(1j * theta)[None, :]
    dens = _density_from_nd(num(zgrid), den(zgrid), w(zgrid))
    radial = np.sum(dens, axis=1) * (2.0 * np.pi / n_theta) * r
    return float(np.sum(radial * wr))


@functools.lru_cache(maxsize=4)
def _torus_grid(n: int):
    xs = (np.arange(n) + 0.5) / n
    zz = (xs[:, None] + 1j * xs[None, :]).ravel()
    return zz, {}


def total_curvature(g: MeroFn, dom: DomainSpec, n: int = 256) -> float:
    """(1/2pi) integral of the curvature density of the lift metric.

    Equals the mapping degree of g for validated data.
    """
    if dom.kind == "sphere":
        r = g.rational()
        inner = _sphere_chart_integral(r.num, r.den)
        rw = r.invert_variable()
        outer = _sphere_chart_integral(rw.num, rw.den)
        return (inner + outer) / (2.0 * np.pi)
    nume, deno = g.numerator_denominator()
    wexpr = nume.derivative() * deno - nume * deno.derivative()
    zz, ctx = _torus_grid(n)
    nv = nume.eval(zz, ctx=ctx)
    dv = deno.eval(zz, ctx=ctx)
    wv = wexpr.eval(zz, ctx=ctx)
    dens = _density_from_nd(nv, dv, wv)
    return float(np.sum(dens)) / (n * n) / (2.0 * np.pi)


def degree_numeric(g: MeroFn, dom: DomainSpec, tol: float = 0.05) -> int:
    """Mapping degree from the curvature integral, gated to be near-integer."""
    val = total_curvature(g, dom)
    nearest = round(val)
    if abs(val - nearest) > tol:
        raise NotNearInteger(f"curvature integral {val:.6f} is not near an integer")
    return int(nearest)
