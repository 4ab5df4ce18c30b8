"""Singular points: location, order criterion, Whitney finite-difference check.

Singular points are the zeros of omega.  A singular point is a cross cap
exactly when omega vanishes to first order there; the Whitney determinant
det(f_u, f_uv, f_vv) in a rotated coordinate gives the independent test.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IndeterminateScale
from .localanalysis import point_to_complex
from .surface import SurfaceEvaluator
from .wdata import WeierstrassData

__all__ = ["SingReport", "singular_points", "whitney_check", "whitney_verdict"]


@dataclass
class SingReport:
    point: object
    order: int                 # order of omega at the point
    is_cross_cap: bool         # order criterion
    whitney_det: float         # normalized finite-difference determinant
    whitney_positive: Optional[bool]  # None when indeterminate
    corank: int = 1


def whitney_check(d: WeierstrassData, q, h: float = 1e-3) -> float:
    """Normalized |det(f_u, f_uv, f_vv)| at the singular point q.

    The coordinate is rotated by -arg((g omega)(q)) so f_v(q) = 0, matching
    the hypothesis of the determinant criterion; the raw determinant scales
    as |(g omega)(q)|^5, which is divided out so the return value is
    directly comparable with |d(1/g)/(g omega)|^2.
    """
    d.require_valid()
    q0 = point_to_complex(q)
    c = complex(d.g_omega.eval(q0))
    phase = cmath.exp(-1j * cmath.phase(c))
    ev = SurfaceEvaluator(d)

    def f(u: float, v: float) -> np.ndarray:
        z = q0 + phase * complex(u, v)
        return np.array(ev.evaluate(z))

    fu = (f(h, 0) - f(-h, 0)) / (2 * h)
    fuv = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    fvv = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h)
    det = float(np.linalg.det(np.stack([fu, fuv, fvv])))
    return abs(det) / abs(c) ** 5


def whitney_verdict(value: float, h: float = 1e-3) -> bool:
    """True = cross cap, False = not; raises when the value sits between
    the two-sided thresholds (caller should shrink h)."""
    if value > 10.0 * h:
        return True
    if value < h * h:
        return False
    raise IndeterminateScale(
        f"Whitney determinant {value:.3e} falls between thresholds for h={h:g}"
    )


def singular_points(d: WeierstrassData, h: float = 1e-3,
                    with_whitney: bool = True) -> list[SingReport]:
    """All singular points with orders and cross-cap flags."""
    d.require_valid()
    out = []
    for q, order in d.interior_form_zeros():
        wdet = float("nan")
        verdict: Optional[bool] = None
        if with_whitney:
            wdet = whitney_check(d, q, h)
            try:
                verdict = whitney_verdict(wdet, h)
            except IndeterminateScale:
                verdict = None
        out.append(SingReport(
            point=q,
            order=order,
            is_cross_cap=(order == 1),
            whitney_det=wdet,
            whitney_positive=verdict,
        ))
    return out
