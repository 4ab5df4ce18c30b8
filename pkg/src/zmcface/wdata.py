"""Weierstrass data for ZMC-faces: validation, duality, fundamental forms.

A surface is encoded by a domain (sphere or square torus with punctures),
a meromorphic Gauss map g and a holomorphic 1-form omega = omega_hat dz.
Admissibility means the compatibility condition (g omega holomorphic, no
common zeros with omega) and the period condition (Re of every g omega
period and every omega period vanish).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import elliptic
from .cxpoly import (
    INFINITY,
    CPoly,
    GaussRat,
    RationalFn,
    rational_roots,
    roots,
)
from .errors import (
    DegenerateDual,
    NotValidated,
    PathThroughSingularity,
    PoleProximity,
    UnsupportedType,
)
from .localanalysis import (
    DomainSpec,
    MeroFn,
    laurent_jet,
    order_of_form_at,
    point_to_complex,
    points_equal,
    residue_of_form_at,
)
from .quad import integrate_segment

__all__ = [
    "WeierstrassData",
    "CompatReport",
    "PeriodReport",
    "ValidationReport",
    "check_compatibility",
    "check_periods",
    "validate",
    "dual_data",
    "fundamental_forms",
    "lightlike_gauss_map",
    "lift_metric_density",
    "curvature_density",
    "MINKOWSKI_SIGNS",
]

RES_TOL = 1e-9
CYCLE_TOL = 1e-8
MINKOWSKI_SIGNS = np.array([-1.0, 1.0, 1.0, 1.0])


class WeierstrassData:
    """Domain, Gauss map g and 1-form coefficient omega_hat."""

    def __init__(self, dom: DomainSpec, g: MeroFn, omega: MeroFn,
                 name: str = "",
                 dual_gstar: Optional[MeroFn] = None,
                 f0_log_abs_of: Optional[MeroFn] = None,
                 f12_closed: Optional[MeroFn] = None,
                 basepoint: complex = 1.0 + 0.0j):
        if omega.is_zero():
            raise ValueError("omega must not vanish identically")
        self.dom = dom
        self.g = g
        self.omega = omega
        self.name = name
        self.dual_gstar = dual_gstar
        self.f0_log_abs_of = f0_log_abs_of
        self.f12_closed = f12_closed
        self.basepoint = complex(basepoint)
        self._g_omega: Optional[MeroFn] = None
        self._validation: Optional[ValidationReport] = None
        self._interior_zeros = None

    @property
    def g_omega(self) -> MeroFn:
        if self._g_omega is None:
            if self.g.is_zero():
                self._g_omega = MeroFn(RationalFn(CPoly()))
            else:
                self._g_omega = self.g * self.omega
        return self._g_omega

    @property
    def is_exact(self) -> bool:
        return self.omega.is_exact and (self.g.is_exact or self.g.is_zero())

    def validate(self) -> "ValidationReport":
        if self._validation is None:
            compat = check_compatibility(self)
            period = check_periods(self)
            self._validation = ValidationReport(compat, period)
        return self._validation

    def require_valid(self):
        rep = self.validate()
        if not rep.ok:
            raise NotValidated(f"{self.name or 'data'}: {rep.summary()}")

    def interior_form_zeros(self) -> list[tuple[object, int]]:
        """Zeros of the form omega inside the domain (the singular points)."""
        if self._interior_zeros is None:
            self._interior_zeros = _form_zeros_in_domain(self.omega, self.dom)
        return self._interior_zeros

    def avoid_points(self) -> list:
        """Points no contour or path should approach."""
        return list(self.dom.punctures) + [p for p, _ in self.interior_form_zeros()]

    def __repr__(self):
        return f"WeierstrassData({self.name or '?'}, {self.dom.kind}, n={len(self.dom.punctures)})"


@dataclass
class CompatReport:
    ok: bool
    common_zeros: list = field(default_factory=list)
    unlisted_poles: list = field(default_factory=list)
    messages: list = field(default_factory=list)


@dataclass
class PeriodReport:
    ok: bool
    residue_table: list = field(default_factory=list)  # dicts per puncture
    cycle_integrals: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)


@dataclass
class ValidationReport:
    compat: CompatReport
    period: PeriodReport

    @property
    def ok(self) -> bool:
        return self.compat.ok and self.period.ok

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(self.compat.messages + self.period.messages) or "invalid"


# --- zero/pole bookkeeping ----------------------------------------------------


def _rational_form_poles(w: RationalFn, dom: DomainSpec) -> list[tuple[object, int]]:
    """Finite and infinite poles of the 1-form w dz with orders (sphere)."""
    out = []
    pts, residual = rational_roots(w.den)
    for p, m in pts:
        out.append((p, -m))
    if residual.degree >= 1:
        for z, m in roots(residual):
            out.append((z, -m))
    if dom.kind == "sphere":
        ord_inf = w.invert_variable().order_at(GaussRat(0)) - 2 if not w.is_zero() else 0
        if ord_inf < 0:
            out.append((INFINITY, ord_inf))
    return out


def _rational_form_zeros(w: RationalFn, dom: DomainSpec) -> list[tuple[object, int]]:
    out = []
    pts, residual = rational_roots(w.num)
    for p, m in pts:
        out.append((p, m))
    if residual.degree >= 1:
        for z, m in roots(residual):
            out.append((z, m))
    if dom.kind == "sphere":
        ord_inf = w.invert_variable().order_at(GaussRat(0)) - 2
        if ord_inf > 0:
            out.append((INFINITY, ord_inf))
    return out


@functools.lru_cache(maxsize=4)
def _search_grid(n_grid: int):
    """Shared torus scan grid; the wp values are cached in the ctx dict."""
    xs = (np.arange(n_grid) + 0.5) / n_grid
    zz = (xs[:, None] + 1j * xs[None, :]).ravel()
    return zz, {}


def _elliptic_zero_search(f: MeroFn, dom: DomainSpec, n_grid: int = 64,
                          mag_cutoff: float = 5.0,
                          puncture_tol: float = 1e-9) -> list[complex]:
    """Grid scan plus Newton refinement for zeros on the fundamental cell."""
    zz, ctx = _search_grid(n_grid)
    vals = np.abs(f.eval(zz, ctx=ctx)).reshape(n_grid, n_grid)
    fprime = f.derivative()
    seeds = []
    for i in range(n_grid):
        for j in range(n_grid):
            v = vals[i, j]
            if v > mag_cutoff:
                continue
            neigh = vals[max(0, i - 1):i + 2, max(0, j - 1):j + 2]
            if v <= neigh.min() + 1e-15:
                seeds.append(complex(zz[i * n_grid + j]))
    if not seeds:
        return []
    zs = np.array(seeds, dtype=complex)
    alive = np.ones(zs.shape, dtype=bool)
    # iterates that drift onto a wp pole are discarded
    alive &= np.abs(elliptic.reduce_to_cell(zs)) > 1e-8
    for _ in range(60):
        if not np.any(alive):
            break
        with np.errstate(all="ignore"):
            fv = np.asarray(f.eval(zs[alive]))
            dv = np.asarray(fprime.eval(zs[alive]))
            step = np.where(dv != 0, fv / np.where(dv != 0, dv, 1.0), 0.0)
        big = np.abs(step) > 0.25
        step[big] *= 0.25 / np.abs(step[big])
        step[~np.isfinite(step)] = 0.0
        nz = zs[alive] - step
        done = np.abs(fv) < 1e-11
        zs[alive] = nz
        idx = np.where(alive)[0]
        alive[idx[done]] = False
        alive &= np.abs(elliptic.reduce_to_cell(zs)) > 1e-8
    found: list[complex] = []
    ok_pts = np.abs(elliptic.reduce_to_cell(zs)) > 1e-8
    final = np.full(zs.shape, np.inf)
    if np.any(ok_pts):
        with np.errstate(all="ignore"):
            final[ok_pts] = np.abs(np.asarray(f.eval(zs[ok_pts])))
    for z, fv in zip(zs, final):
        if not np.isfinite(fv) or fv > 1e-9:
            continue
        zc = complex(elliptic.reduce_to_cell(z))
        if any(abs(complex(elliptic.reduce_to_cell(zc - w))) < 1e-6 for w in found):
            continue
        if any(points_equal(zc, q, tol=puncture_tol, torus=True)
               for q in dom.punctures):
            continue
        found.append(zc)
    return sorted(found, key=lambda w: (round(w.real, 8), round(w.imag, 8)))


def _form_zeros_in_domain(w: MeroFn, dom: DomainSpec) -> list[tuple[object, int]]:
    if w.is_exact:
        zeros = []
        for p, m in _rational_form_zeros(w.rational(), dom):
            if any(points_equal(p, q) for q in dom.punctures):
                continue
            zeros.append((p, m))
        return zeros
    out = []
    for z in _elliptic_zero_search(w, dom):
        jet = laurent_jet(w, z, 2, dom, form=True, avoid=dom.punctures)
        out.append((z, jet.lead_order))
    return out


# --- operations ----------------------------------------------------------------


def check_compatibility(d: WeierstrassData) -> CompatReport:
    """Condition (C): g omega holomorphic on the domain, no common zero with omega."""
    rep = CompatReport(ok=True)
    torus = d.dom.kind == "torus"

    if d.g.is_zero():
        # g omega vanishes identically, so every zero of omega kills dF
        for p, m in _form_poles(d.omega, d.dom):
            if not any(points_equal(p, q, torus=torus) for q in d.dom.punctures):
                rep.ok = False
                rep.unlisted_poles.append(p)
                rep.messages.append(f"pole of omega at {p!r} is not a puncture")
        for p, _ in _form_zeros_in_domain(d.omega, d.dom):
            rep.ok = False
            rep.common_zeros.append(p)
            rep.messages.append(
                f"omega vanishes at {p!r} while g*omega is identically zero"
            )
        return rep

    for label, fn in (("omega", d.omega), ("g*omega", d.g_omega)):
        for p, m in _form_poles(fn, d.dom):
            if not any(points_equal(p, q, torus=torus) for q in d.dom.punctures):
                rep.ok = False
                rep.unlisted_poles.append(p)
                rep.messages.append(f"pole of {label} at {p!r} is not a puncture")

    omega_zeros = _form_zeros_in_domain(d.omega, d.dom)
    gomega_zeros = _form_zeros_in_domain(d.g_omega, d.dom)
    for p, _ in omega_zeros:
        for q, _ in gomega_zeros:
            if points_equal(p, q, torus=torus):
                rep.ok = False
                rep.common_zeros.append(p)
                rep.messages.append(f"omega and g*omega share a zero at {p!r}")

    # every puncture must actually be an end (a pole of omega or g*omega)
    for q in d.dom.punctures:
        ow = order_of_form_at(d.omega, q, d.dom, avoid=[z for z, _ in omega_zeros])
        try:
            gw = order_of_form_at(d.g_omega, q, d.dom, avoid=[z for z, _ in omega_zeros])
        except Exception:
            gw = 0
        if ow >= 0 and gw >= 0:
            rep.ok = False
            rep.messages.append(f"puncture {q!r} is not a pole of omega or g*omega")
    return rep


def _form_poles(w: MeroFn, dom: DomainSpec) -> list[tuple[object, int]]:
    if w.is_exact:
        return _rational_form_poles(w.rational(), dom)
    # elliptic: poles can only sit at lattice points or where a denominator
    # vanishes; scan the reciprocal for zeros.  Newton resolves a reciprocal
    # zero of order k only to ~tol^(1/k), so match punctures loosely.
    recip_candidates = _elliptic_zero_search(_reciprocal(w), dom, puncture_tol=1e-4)
    out = []
    for z in recip_candidates:
        jet = laurent_jet(w, z, 2, dom, form=True, avoid=dom.punctures)
        if jet.lead_order < 0:
            out.append((z, jet.lead_order))
    # lattice point 0 (all wp poles are lattice-equivalent to it)
    try:
        jet0 = laurent_jet(w, GaussRat(0), 2, dom, form=True, avoid=dom.punctures)
        if jet0.lead_order < 0:
            out.append((GaussRat(0), jet0.lead_order))
    except Exception:
        pass
    merged = []
    for p, m in out:
        if not any(points_equal(p, q, torus=True) for q, _ in merged):
            merged.append((p, m))
    return merged


def _reciprocal(w: MeroFn) -> MeroFn:
    if w.is_exact:
        return MeroFn(w.rational().reciprocal())
    return MeroFn(elliptic.const_expr(1.0) / w.carrier)


def check_periods(d: WeierstrassData) -> PeriodReport:
    """Condition (P): all omega-periods vanish, g omega periods are imaginary."""
    rep = PeriodReport(ok=True)
    torus = d.dom.kind == "torus"
    avoid = [p for p, _ in d.interior_form_zeros()]
    for p in d.dom.punctures:
        res_w = residue_of_form_at(d.omega, p, d.dom, avoid=avoid)
        if d.g.is_zero():
            res_gw = 0.0 + 0.0j
        else:
            res_gw = residue_of_form_at(d.g_omega, p, d.dom, avoid=avoid)
        entry = {
            "point": p,
            "res_omega": res_w,
            "res_g_omega": res_gw,
        }
        rep.residue_table.append(entry)
        if isinstance(res_w, GaussRat):
            bad_w = not res_w.is_zero()
        else:
            bad_w = abs(res_w) > RES_TOL
        if bad_w:
            rep.ok = False
            rep.messages.append(f"residue of omega at {p!r} is {res_w!r}, not 0")
        if isinstance(res_gw, GaussRat):
            bad_gw = res_gw.im != 0
            im_part = float(res_gw.im)
        else:
            im_part = float(np.imag(res_gw))
            bad_gw = abs(im_part) > RES_TOL
        if bad_gw:
            rep.ok = False
            rep.messages.append(
                f"residue of g*omega at {p!r} has imaginary part {im_part:.3e}"
            )
    if torus:
        z0 = _clear_cycle_basepoint(d)
        for label, direction in (("cycle_1", 1.0 + 0j), ("cycle_i", 1j)):
            cw = integrate_segment(lambda z: d.omega.eval(z), z0, z0 + direction)
            cgw = integrate_segment(lambda z: d.g_omega.eval(z), z0, z0 + direction)
            rep.cycle_integrals[label] = {"omega": cw, "g_omega": cgw}
            if abs(cw) > CYCLE_TOL:
                rep.ok = False
                rep.messages.append(f"omega period along {label} is {abs(cw):.2e}")
            if abs(cgw.real) > CYCLE_TOL:
                rep.ok = False
                rep.messages.append(
                    f"Re g*omega period along {label} is {cgw.real:.2e}"
                )
    return rep


def _clear_cycle_basepoint(d: WeierstrassData, guard: float = 0.05) -> complex:
    """Basepoint whose two generator segments avoid punctures and zeros."""
    obstacles = [point_to_complex(p) for p in d.dom.punctures]
    obstacles += [point_to_complex(p) for p, _ in d.interior_form_zeros()]
    obstacles.append(0.0 + 0.0j)  # lattice pole of wp

    def clear(z0: complex) -> bool:
        for direction in (1.0 + 0j, 1j):
            for q in obstacles:
                # distance from the segment to q modulo the lattice
                for mm in (-1, 0, 1):
                    for nn in (-1, 0, 1):
                        qq = q + mm + 1j * nn
                        if _seg_dist(z0, z0 + direction, qq) < guard:
                            return False
        return True

    rng = np.random.default_rng(11)
    for _ in range(400):
        z0 = complex(rng.uniform(0, 1), rng.uniform(0, 1))
        if clear(z0):
            return z0
    raise PathThroughSingularity("no clear torus cycle basepoint found")


def _seg_dist(a: complex, b: complex, q: complex) -> float:
    ab = b - a
    t = ((q - a).real * ab.real + (q - a).imag * ab.imag) / abs(ab) ** 2
    t = min(1.0, max(0.0, t))
    return abs(a + t * ab - q)


def validate(d: WeierstrassData) -> ValidationReport:
    return d.validate()


def dual_data(d: WeierstrassData, require_valid: bool = True) -> WeierstrassData:
    """Dual Weierstrass data (g*, omega*) = (primitive of omega, dg).

    The dual domain loses the singular points of the original surface.
    Duals can carry branch points (common zeros of omega* and g* omega*),
    so a dual need not validate as admissible data itself; pass
    require_valid=False to dualize such data again, which only needs the
    omega-residues to vanish.
    """
    if require_valid:
        d.require_valid()
    if d.g.is_zero() or (d.g.is_exact and d.g.rational().map_degree() == 0):
        raise DegenerateDual("dual 1-form dg vanishes identically (plane)")
    omega_star = d.g.derivative()
    if d.omega.is_exact:
        rat, logs = d.omega.rational().antiderivative()
        if logs:
            raise NotValidated("omega has a nonzero residue; primitive is multivalued")
        gstar = MeroFn(rat)
    else:
        if d.dual_gstar is None:
            raise UnsupportedType(
                "elliptic carrier needs a closed-form primitive of omega"
            )
        gstar = d.dual_gstar
    new_punct = list(d.dom.punctures)
    for p, _ in d.interior_form_zeros():
        if not any(points_equal(p, q, torus=d.dom.kind == "torus") for q in new_punct):
            new_punct.append(p)
    dom_star = DomainSpec(d.dom.kind, tuple(new_punct))
    return WeierstrassData(
        dom_star, gstar, omega_star,
        name=f"{d.name}_dual" if d.name else "dual",
        basepoint=d.basepoint,
    )


def fundamental_forms(d: WeierstrassData, z: complex):
    """First and second fundamental forms at z.

    Returns (|omega_hat|^2, (h_uu, h_uv, h_vv)) where the second entry gives
    h = h_uu du^2 + h_uv du dv + h_vv dv^2.
    """
    w = complex(d.omega.eval(z))
    gp = complex(d.g.derivative().eval(z)) if not d.g.is_zero() else 0.0 + 0.0j
    a = w * gp
    if not (np.isfinite(w) and np.isfinite(gp)):
        raise PoleProximity(f"fundamental forms undefined at {z!r}")
    return abs(w) ** 2, (a.real, -2.0 * a.imag, -a.real)


def lightlike_gauss_map(d: WeierstrassData, z: complex) -> np.ndarray:
    """The light-like Gauss map as a vector in Minkowski 4-space."""
    gv = complex(d.g.eval(z)) if not d.g.is_zero() else 0.0 + 0.0j
    if not np.isfinite(gv.real) or not np.isfinite(gv.imag) or abs(gv) > 1e12:
        raise PoleProximity(f"Gauss map pole at {z!r}")
    a = abs(gv) ** 2
    return np.array([-0.5 * a - 0.5, -gv.real, gv.imag, -0.5 * a + 0.5])


def lift_metric_density(d: WeierstrassData, z) -> float:
    """Density of the lift metric: (2+|g|^2)|omega_hat|^2, computed pole-free."""
    w = d.omega.eval(z)
    gw = d.g_omega.eval(z) if not d.g.is_zero() else 0.0 * np.asarray(w)
    return 2.0 * np.abs(w) ** 2 + np.abs(gw) ** 2


def curvature_density(d: WeierstrassData, z) -> float:
    """Gaussian curvature of the lift metric; always <= 0."""
    lam = lift_metric_density(d, z)
    if d.g.is_zero():
        return 0.0 * np.asarray(lam)
    n, den = d.g.numerator_denominator()
    if d.g.is_exact:
        nv, dv = n(z), den(z)
        wv = (n.derivative() * den - n * den.derivative())(z)
    else:
        ctx: dict = {}
        nv = n.eval(z, ctx=ctx)
        dv = den.eval(z, ctx=ctx)
        wv = (n.derivative() * den - n * den.derivative()).eval(z, ctx=ctx)
    dens = 4.0 * np.abs(wv) ** 2 / (2.0 * np.abs(dv) ** 2 + np.abs(nv) ** 2) ** 2
    return -dens / lam
