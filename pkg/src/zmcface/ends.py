"""End classification and asymptotic models.

An end is expanding when the order of omega there is at most -2 and
shrinking when it is at least 0 (order -1 is excluded by the period
condition).  Embeddedness needs order -2 or 0 exactly.  The named
asymptotic types are decided by the order table of omega, the dual form
dg and g omega, plus the residue of g omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cxpoly import INFINITY
from .errors import EvaluationFailure, NotValidated
from .localanalysis import (
    LaurentJet,
    MeroFn,
    laurent_jet,
    order_of_form_at,
    point_to_complex,
    residue_of_form_at,
)
from .surface import SurfaceEvaluator
from .wdata import WeierstrassData

__all__ = [
    "EndReport",
    "AsymptoticModel",
    "classify_end",
    "classify_all_ends",
    "asymptotic_model",
    "verify_o1",
    "O1Table",
]

END_TYPES = (
    "Planar",
    "ExpandingCatenoidal",
    "ShrinkingCatenoidal",
    "EnneperParabolic",
    "LayeredShrinkingCatenoidal",
    "Other",
)


@dataclass
class EndReport:
    point: object
    ord_omega: int
    ord_omega_star: Optional[int]
    ord_g_omega: Optional[int]
    res_g_omega: complex
    growth: str                      # "Expanding" | "Shrinking"
    embedded: bool
    asymp_type: str
    layered_family: bool             # shrinking with ord(g omega) = -1


def _dual_form(d: WeierstrassData) -> Optional[MeroFn]:
    if d.g.is_zero():
        return None
    ws = d.g.derivative()
    if ws.is_zero():
        return None
    return ws


def classify_end(d: WeierstrassData, p, require_valid: bool = True) -> EndReport:
    """Classify one end.  require_valid=False admits dual data, whose
    interior branch points are irrelevant to the local analysis at an end."""
    if require_valid:
        d.require_valid()
    avoid = [q for q, _ in d.interior_form_zeros()]
    ow = order_of_form_at(d.omega, p, d.dom, avoid=avoid)
    if ow == -1:
        raise NotValidated(f"ord(omega) = -1 at {p!r}; period condition broken")
    omega_star = _dual_form(d)
    ows: Optional[int] = None
    if omega_star is not None:
        ows = order_of_form_at(omega_star, p, d.dom, avoid=avoid)
    ogw: Optional[int] = None
    res_gw: complex = 0.0 + 0.0j
    if not d.g.is_zero():
        ogw = order_of_form_at(d.g_omega, p, d.dom, avoid=avoid)
        res_gw = complex(residue_of_form_at(d.g_omega, p, d.dom, avoid=avoid))
    growth = "Expanding" if ow <= -2 else "Shrinking"
    embedded = ow in (-2, 0)
    layered = growth == "Shrinking" and ogw == -1
    res_zero = abs(res_gw) < 1e-9

    if ow == -2 and (ows is None or ows >= 1):
        kind = "Planar"
    elif ow == -2 and ows == 0:
        kind = "ExpandingCatenoidal"
    elif ow == 0 and ows == -2:
        kind = "ShrinkingCatenoidal"
    elif ow == -2 and ows == -2 and res_zero:
        kind = "EnneperParabolic"
    elif layered:
        kind = "LayeredShrinkingCatenoidal"
    else:
        kind = "Other"
    return EndReport(
        point=p,
        ord_omega=ow,
        ord_omega_star=ows,
        ord_g_omega=ogw,
        res_g_omega=res_gw,
        growth=growth,
        embedded=embedded,
        asymp_type=kind,
        layered_family=layered,
    )


def classify_all_ends(d: WeierstrassData, require_valid: bool = True) -> list[EndReport]:
    return [classify_end(d, p, require_valid=require_valid) for p in d.dom.punctures]


# --- asymptotic models ----------------------------------------------------------


@dataclass
class AsymptoticModel:
    """Truncated normal form of f near an end, in the local chart.

    f12 ~ sum of c_n zeta^n over `f12_terms` (dict n -> complex);
    f0  ~ Re(sum over `f0_terms`) + `f0_log` * log|zeta|.
    At infinity the chart variable is w = 1/z.
    """

    point: object
    f12_terms: dict
    f0_terms: dict
    f0_log: float
    chart_scale: float  # reference radius used to pin the constants

    def eval(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        f12 = np.zeros(zeta.shape, dtype=complex)
        for n, c in self.f12_terms.items():
            f12 = f12 + c * zeta**n
        f0c = np.zeros(zeta.shape, dtype=complex)
        for n, c in self.f0_terms.items():
            f0c = f0c + c * zeta**n
        f0 = np.real(f0c) + self.f0_log * np.log(np.abs(zeta))
        return np.stack([f0, np.real(f12), np.imag(f12)], axis=-1)

    def coefficient_scale(self) -> float:
        vals = [abs(self.f0_log)]
        vals += [abs(c) for c in self.f12_terms.values()]
        vals += [abs(c) for c in self.f0_terms.values()]
        return max(1.0, max(vals, default=0.0))


def _integrated_terms(jet: LaurentJet, keep_through: int) -> tuple[dict, float]:
    """Integrate a form-coefficient jet term-wise; split off the log term."""
    terms: dict = {}
    log_coeff = 0.0
    for idx, c in enumerate(jet.coeffs):
        n = jet.lead_order + idx
        if n > keep_through:
            break
        c = complex(c)
        if abs(c) < 1e-12 * max(1.0, float(np.max(np.abs(jet.coeffs)))):
            continue
        if n == -1:
            log_coeff = c.real
        else:
            terms[n + 1] = c / (n + 1)
    return terms, log_coeff


def asymptotic_model(d: WeierstrassData, p, ref_radius: Optional[float] = None) -> AsymptoticModel:
    """Build the truncated normal form at an end from Laurent data.

    Keeps the principal part, the constant, and the first analytic term of
    both primitives; constants are pinned by circle means of f itself
    (exact for harmonic/analytic functions).
    """
    d.require_valid()
    avoid = [q for q, _ in d.interior_form_zeros()]
    ow_jet = laurent_jet(d.omega, p, 8, d.dom, form=True, avoid=avoid)
    keep = max(0, ow_jet.lead_order)
    f12_terms, f12_log = _integrated_terms(ow_jet, keep)
    if abs(f12_log) > 1e-9:
        raise EvaluationFailure("omega residue should vanish at a validated end")
    if d.g.is_zero():
        f0_terms: dict = {}
        f0_log = 0.0
    else:
        gw_jet = laurent_jet(d.g_omega, p, 8, d.dom, form=True, avoid=avoid)
        keep0 = max(0, gw_jet.lead_order)
        f0_terms, f0_log = _integrated_terms(gw_jet, keep0)

    ev = SurfaceEvaluator(d)
    if ref_radius is None:
        ref_radius = min(0.45 * _clearance(d, p), 0.2)
    m = 128
    ang = 2.0 * np.pi * np.arange(m) / m
    zeta = ref_radius * np.exp(1j * ang)
    if p is INFINITY:
        zs = 1.0 / zeta
    else:
        zs = point_to_complex(p) + zeta
    vals = ev.evaluate_many(zs)
    f12_samples = vals[:, 1] + 1j * vals[:, 2]
    # circle means kill every nonzero power, leaving exactly the constants
    partial12 = np.zeros(m, dtype=complex)
    for n, c in f12_terms.items():
        if n != 0:
            partial12 += c * zeta**n
    f12_terms[0] = complex(np.mean(f12_samples - partial12))
    partial0 = np.zeros(m)
    for n, c in f0_terms.items():
        if n != 0:
            partial0 += np.real(c * zeta**n)
    f0_const = float(np.mean(vals[:, 0] - partial0)) - f0_log * math.log(ref_radius)
    f0_terms[0] = complex(f0_const)
    return AsymptoticModel(p, f12_terms, f0_terms, f0_log, ref_radius)


def _clearance(d: WeierstrassData, p) -> float:
    """Distance from p to the nearest other special point, in the local chart."""
    torus = d.dom.kind == "torus"
    others = []
    for q in list(d.dom.punctures) + [q for q, _ in d.interior_form_zeros()]:
        if q is p or (q is INFINITY and p is INFINITY):
            continue
        if p is not INFINITY and q is not INFINITY and \
                abs(point_to_complex(q) - point_to_complex(p)) < 1e-12:
            continue
        others.append(q)
    if p is INFINITY:
        ds = [1.0 / abs(point_to_complex(q)) for q in others
              if q is not INFINITY and abs(point_to_complex(q)) > 1e-9]
        ds.append(0.5)
        return min(ds)
    p0 = point_to_complex(p)
    ds = []
    for q in others:
        if q is INFINITY:
            continue
        dd = point_to_complex(q) - p0
        if torus:
            from . import elliptic

            dd = complex(elliptic.reduce_to_cell(dd))
        ds.append(abs(dd))
    if torus:
        # wp pole lattice
        from . import elliptic

        dlat = abs(complex(elliptic.reduce_to_cell(p0)))
        if dlat > 1e-12:
            ds.append(dlat)
    ds.append(1.0)
    return min(ds)


@dataclass
class O1Table:
    point: object
    radii: list
    deviations: list
    threshold: float
    passed: bool


def verify_o1(d: WeierstrassData, p, radii: Optional[Sequence[float]] = None,
              n_angles: int = 64) -> O1Table:
    """Check f(z) - model(z) -> 0 along shrinking circles around the end."""
    model = asymptotic_model(d, p)
    if radii is None:
        top = min(0.1, model.chart_scale)
        radii = list(np.geomspace(top, top * 1e-2, 5))
    ev = SurfaceEvaluator(d)
    devs = []
    for r in radii:
        ang = 2.0 * np.pi * (np.arange(n_angles) + 0.17) / n_angles
        zeta = r * np.exp(1j * ang)
        zs = 1.0 / zeta if p is INFINITY else point_to_complex(p) + zeta
        actual = ev.evaluate_many(zs)
        predicted = model.eval(zeta)
        devs.append(float(np.max(np.abs(actual - predicted))))
    threshold = 1e-3 * model.coefficient_scale()
    decreasing = all(
        devs[k + 1] <= devs[k] + 1e-12 * model.coefficient_scale()
        for k in range(max(0, len(devs) - 3), len(devs) - 1)
    )
    # a sequence already at the roundoff floor counts as converged
    at_floor = max(devs) < 1e-9 * model.coefficient_scale()
    passed = (decreasing or at_floor) and devs[-1] < threshold
    return O1Table(p, list(radii), devs, threshold, passed)
