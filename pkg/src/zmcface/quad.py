"""Adaptive Gauss-Kronrod quadrature for complex-valued integrands."""

from __future__ import annotations

import numpy as np

from .errors import QuadratureFailure

__all__ = ["gauss_kronrod", "integrate_segment", "integrate_polyline"]

# Standard (G7, K15) abscissae/weights on [-1, 1].
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])
_GAUSS_IDX = np.arange(1, 15, 2)


def _panel(f, a: float, b: float):
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + h * _XK
    y = np.asarray(f(x), dtype=complex)
    k15 = h * np.sum(_WK * y)
    g7 = h * np.sum(_WG * y[_GAUSS_IDX])
    return k15, abs(k15 - g7)


def gauss_kronrod(f, a: float, b: float, tol: float = 1e-10,
                  max_panels: int = 4096) -> complex:
    """Adaptive integral of a vectorized complex integrand over [a, b]."""
    stack = [(a, b)]
    total = 0.0 + 0.0j
    panels = 0
    while stack:
        lo, hi = stack.pop()
        val, err = _panel(f, lo, hi)
        panels += 1
        if panels > max_panels:
            raise QuadratureFailure("adaptive quadrature budget exhausted")
        if err <= tol * max(1.0, (hi - lo) / max(b - a, 1e-300)) or hi - lo < 1e-14:
            total += val
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid))
            stack.append((mid, hi))
    return total


def integrate_segment(fn, z0: complex, z1: complex, tol: float = 1e-10) -> complex:
    """Integral of fn(z) dz along the straight segment from z0 to z1."""
    dz = z1 - z0

    def fpar(t):
        return np.asarray(fn(z0 + t * dz), dtype=complex) * dz

    return gauss_kronrod(fpar, 0.0, 1.0, tol=tol)


def integrate_polyline(fn, waypoints, tol: float = 1e-10) -> complex:
    total = 0.0 + 0.0j
    for z0, z1 in zip(waypoints[:-1], waypoints[1:]):
        total += integrate_segment(fn, z0, z1, tol=tol)
    return total
