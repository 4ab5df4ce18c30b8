"""Surface evaluation f = Re int (g, 1, -i) omega, duals, meshes, OBJ export.

Three evaluation strategies: exact primitives (rational carriers), fixture
closed forms (elliptic carriers), and adaptive path integration from a
basepoint (any carrier; the independent cross-check).  The t-component only
ever uses real logarithms log|z - p|, which is exactly what the period
condition licenses.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cxpoly import INFINITY, RationalFn
from .errors import (
    DegenerateDual,
    EvaluationFailure,
    PathBlocked,
    UnsupportedType,
)
from .localanalysis import point_to_complex
from .quad import integrate_polyline
from .wdata import WeierstrassData, dual_data

__all__ = [
    "SurfaceEvaluator",
    "evaluate",
    "evaluate_dual",
    "Mesh",
    "MeshConfig",
    "mesh",
    "write_obj",
    "proper_embeddedness_probe",
    "ProbeReport",
]


class SurfaceEvaluator:
    """Maps domain points to (t, x, y) in isotropic 3-space."""

    def __init__(self, d: WeierstrassData, strategy: str = "auto"):
        self.data = d
        if strategy == "auto":
            strategy = "exact" if d.is_exact else "closed"
        self.strategy = strategy
        if strategy == "exact":
            if d.g.is_zero():
                self._phi_rat = RationalFn(0)
                self._phi_logs = []
            else:
                gw = d.g_omega.rational()
                self._phi_rat, self._phi_logs = gw.antiderivative()
                for pole, c in self._phi_logs:
                    if c.im != 0:
                        raise EvaluationFailure(
                            "g*omega has a non-real residue; data fails the period condition"
                        )
            self._gstar_rat, glogs = d.omega.rational().antiderivative()
            if glogs:
                raise EvaluationFailure(
                    "omega has a nonzero residue; data fails the period condition"
                )
        elif strategy == "closed":
            if d.f0_log_abs_of is None or d.f12_closed is None:
                raise UnsupportedType("no closed forms recorded for this data")
        elif strategy == "path":
            self._basepoint = d.basepoint
            self._obstacles = [point_to_complex(p) for p in d.dom.punctures
                               if p is not INFINITY]
            self._guard = 1e-3
        else:
            raise ValueError(f"unknown strategy {strategy!r}")

    # vectorized over numpy arrays of complex z
    def components(self, z):
        z = np.asarray(z, dtype=complex)
        if self.strategy == "exact":
            f0 = np.real(self._phi_rat(z)) if not self._phi_rat.is_zero() else np.zeros(z.shape)
            for pole, c in self._phi_logs:
                f0 = f0 + float(c.re) * np.log(np.abs(z - complex(pole)))
            f12 = self._gstar_rat(z)
            return f0, f12
        if self.strategy == "closed":
            ctx: dict = {}
            a = self.data.f0_log_abs_of.eval(z, ctx=ctx)
            f12 = self.data.f12_closed.eval(z, ctx=ctx)
            return np.log(np.abs(a)), f12
        return self._path_components(z)

    def _path_components(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        f0 = np.empty(z.shape)
        f12 = np.empty(z.shape, dtype=complex)
        for k, zk in enumerate(z.ravel()):
            pts = _route(self._basepoint, complex(zk), self._obstacles, self._guard)
            gw = self.data.g_omega
            if self.data.g.is_zero():
                phi = 0.0 + 0.0j
            else:
                phi = integrate_polyline(lambda w: gw.eval(w), pts)
            gs = integrate_polyline(lambda w: self.data.omega.eval(w), pts)
            f0.ravel()[k] = phi.real
            f12.ravel()[k] = gs
        return f0, f12

    def evaluate(self, z):
        """(t, x, y) at a single point."""
        f0, f12 = self.components(np.asarray([complex(z)]))
        return float(f0[0]), float(np.real(f12[0])), float(np.imag(f12[0]))

    def evaluate_many(self, z):
        f0, f12 = self.components(z)
        return np.stack([np.real(f0), np.real(f12), np.imag(f12)], axis=-1)


def _route(z0: complex, z1: complex, obstacles: Sequence[complex],
           guard: float, depth: int = 0) -> list[complex]:
    """Polyline from z0 to z1 keeping >= guard away from every obstacle."""
    if depth > 12:
        raise PathBlocked("could not route around punctures")
    seg = z1 - z0
    if abs(seg) < 1e-300:
        return [z0, z1]
    worst = None
    worst_d = guard
    for q in obstacles:
        t = ((q - z0).real * seg.real + (q - z0).imag * seg.imag) / abs(seg) ** 2
        t = min(1.0, max(0.0, t))
        foot = z0 + t * seg
        dist = abs(foot - q)
        if dist < worst_d and 1e-12 < t < 1 - 1e-12:
            worst = (q, foot, dist)
            worst_d = dist
    if worst is None:
        return [z0, z1]
    q, foot, dist = worst
    if dist < 1e-12:
        normal = 1j * seg / abs(seg)
    else:
        normal = (foot - q) / dist
    way = q + normal * max(2.0 * guard, 2.0 * dist)
    left = _route(z0, way, obstacles, guard, depth + 1)
    right = _route(way, z1, obstacles, guard, depth + 1)
    return left[:-1] + right


def evaluate(d: WeierstrassData, z, strategy: str = "auto"):
    return SurfaceEvaluator(d, strategy).evaluate(z)


def evaluate_dual(d: WeierstrassData, z, strategy: str = "auto"):
    """The dual surface: evaluate the dual data, then reflect y -> -y.

    The dual lift satisfies the opposite null factor (the +i slot), which
    conjugates the (x, y) pair relative to the primal convention.
    """
    dd = dual_data(d)
    if dd.omega.is_zero():
        raise DegenerateDual("dual 1-form vanishes")
    t, x, y = SurfaceEvaluator(dd, strategy).evaluate(z)
    return t, x, -y


# --- meshes -------------------------------------------------------------------


@dataclass(frozen=True)
class MeshConfig:
    r_min: float = 0.05
    r_max: float = 20.0
    n_angles: int = 96
    n_radial: int = 40
    guard: float = 1e-3
    interior_bound: float = 2.5
    interior_n: int = 33
    torus_n: int = 49
    torus_guard: float = 0.06

    def digest(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class Mesh:
    vertices: list = field(default_factory=list)   # (t, x, y) triples
    faces: list = field(default_factory=list)      # quad index tuples, 0-based
    markers: list = field(default_factory=list)    # singular point images
    domain_points: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _end_annulus(d: WeierstrassData, ev: SurfaceEvaluator, p, cfg: MeshConfig,
                 mesh_obj: Mesh):
    radii = np.geomspace(cfg.r_max, cfg.r_min, cfg.n_radial)
    ang = 2.0 * np.pi * np.arange(cfg.n_angles) / cfg.n_angles
    if p is INFINITY:
        zgrid = 1.0 / (radii[:, None] * np.exp(1j * ang)[None, :])
    else:
        p0 = point_to_complex(p)
        zgrid = p0 + radii[:, None] * np.exp(1j * ang)[None, :]
    # skip ring points that collide with other punctures
    others = [point_to_complex(q) for q in d.dom.punctures
              if q is not p and q is not INFINITY]
    flat = zgrid.ravel()
    ok = np.ones(flat.shape, dtype=bool)
    for q in others:
        ok &= np.abs(flat - q) > cfg.guard
    vals = np.full((flat.shape[0], 3), np.nan)
    vals[ok] = ev.evaluate_many(flat[ok])
    base = len(mesh_obj.vertices)
    mesh_obj.vertices.extend(map(tuple, vals))
    mesh_obj.domain_points.extend(flat.tolist())
    nr, na = zgrid.shape
    for i in range(nr - 1):
        for j in range(na):
            j2 = (j + 1) % na
            idx = (base + i * na + j, base + i * na + j2,
                   base + (i + 1) * na + j2, base + (i + 1) * na + j)
            if all(np.isfinite(mesh_obj.vertices[k]).all() for k in idx):
                mesh_obj.faces.append(idx)


def mesh(d: WeierstrassData, cfg: Optional[MeshConfig] = None) -> Mesh:
    """Deterministic visualization mesh: end collars plus an interior grid."""
    d.require_valid()
    cfg = cfg or MeshConfig()
    ev = SurfaceEvaluator(d)
    out = Mesh(meta={"name": d.name, "config": cfg.digest(), "kind": d.dom.kind})
    if d.dom.kind == "torus":
        n = cfg.torus_n
        xs = (np.arange(n) + 0.5) / n
        zgrid = xs[:, None] + 1j * xs[None, :]
        flat = zgrid.ravel()
        ok = np.ones(flat.shape, dtype=bool)
        for q in d.dom.punctures:
            q0 = point_to_complex(q)
            for mm in (-1, 0, 1):
                for nn in (-1, 0, 1):
                    ok &= np.abs(flat - (q0 + mm + 1j * nn)) > cfg.torus_guard
        # wp pole at lattice points
        for mm in (0, 1):
            for nn in (0, 1):
                ok &= np.abs(flat - (mm + 1j * nn)) > cfg.torus_guard
        vals = np.full((flat.shape[0], 3), np.nan)
        vals[ok] = ev.evaluate_many(flat[ok])
        out.vertices.extend(map(tuple, vals))
        out.domain_points.extend(flat.tolist())
        for i in range(n - 1):
            for j in range(n - 1):
                idx = (i * n + j, i * n + j + 1, (i + 1) * n + j + 1, (i + 1) * n + j)
                if all(ok[k] for k in idx):
                    out.faces.append(idx)
    else:
        for p in d.dom.punctures:
            _end_annulus(d, ev, p, cfg, out)
        # interior patch
        n = cfg.interior_n
        xs = np.linspace(-cfg.interior_bound, cfg.interior_bound, n)
        zgrid = xs[None, :] + 1j * xs[:, None]
        flat = zgrid.ravel()
        ok = np.ones(flat.shape, dtype=bool)
        for q in d.dom.punctures:
            if q is INFINITY:
                continue
            ok &= np.abs(flat - point_to_complex(q)) > cfg.guard
        vals = np.full((flat.shape[0], 3), np.nan)
        vals[ok] = ev.evaluate_many(flat[ok])
        base = len(out.vertices)
        out.vertices.extend(map(tuple, vals))
        out.domain_points.extend(flat.tolist())
        for i in range(n - 1):
            for j in range(n - 1):
                idx = (base + i * n + j, base + i * n + j + 1,
                       base + (i + 1) * n + j + 1, base + (i + 1) * n + j)
                if all(ok[k - base] for k in idx):
                    out.faces.append(idx)
    for q, _m in d.interior_form_zeros():
        out.markers.append(ev.evaluate(point_to_complex(q)))
    return out


def write_obj(m: Mesh, fh) -> None:
    """OBJ export; vertex lines are 'v t x y' (t first, never rescaled)."""
    fh.write(f"# zmcface mesh: {m.meta.get('name', '?')}\n")
    fh.write(f"# config: {m.meta.get('config', '?')}\n")
    fh.write("# axes: v lines are 'v t x y'; t is the first coordinate\n")
    index = {}
    for i, v in enumerate(m.vertices):
        if np.all(np.isfinite(v)):
            index[i] = len(index) + 1
            fh.write("v %.17g %.17g %.17g\n" % tuple(v))
    for face in m.faces:
        if all(i in index for i in face):
            fh.write("f " + " ".join(str(index[i]) for i in face) + "\n")
    for mk in m.markers:
        fh.write("# marker %.17g %.17g %.17g\n" % tuple(mk))


def obj_string(m: Mesh) -> str:
    import io

    buf = io.StringIO()
    write_obj(m, buf)
    return buf.getvalue()


# --- proper embeddedness probe ---------------------------------------------------


@dataclass
class ProbeReport:
    result: str  # "PASS" | "INCONCLUSIVE"
    reasons: list = field(default_factory=list)
    end_summaries: dict = field(default_factory=dict)


def _collar_samples(d: WeierstrassData, ev: SurfaceEvaluator, p, radii,
                    n_ang: int = 48):
    rows = []
    for r in radii:
        ang = 2.0 * np.pi * (np.arange(n_ang) + 0.31) / n_ang
        if p is INFINITY:
            zs = 1.0 / (r * np.exp(1j * ang))
        else:
            zs = point_to_complex(p) + r * np.exp(1j * ang)
        vals = ev.evaluate_many(zs)
        t = vals[:, 0]
        xy = vals[:, 1] + 1j * vals[:, 2]
        rows.append({
            "radius": r,
            "t_min": float(np.min(t)),
            "t_max": float(np.max(t)),
            "xy_center": complex(np.mean(xy)),
            "xy_spread": float(np.max(np.abs(xy - np.mean(xy)))),
            "xy_min_abs": float(np.min(np.abs(xy))),
        })
    return rows


def proper_embeddedness_probe(d: WeierstrassData, bound: float = 10.0) -> ProbeReport:
    """Certificate that end collars are pairwise disjoint far out.

    PASS needs every end embedded plus, for each pair, either separating
    t-intervals with a widening gap or separated (x, y) footprints.  The
    probe never claims a false PASS: anything unresolved is INCONCLUSIVE.
    """
    d.require_valid()
    from .ends import classify_end  # local import to avoid a cycle

    ev = SurfaceEvaluator(d)
    reasons = []
    ends = {}
    for p in d.dom.punctures:
        rep = classify_end(d, p)
        if not rep.embedded:
            return ProbeReport("INCONCLUSIVE",
                               [f"end {p!r} is not embedded (ord omega = {rep.ord_omega})"])
        ends[p] = rep
    if d.dom.kind == "torus":
        base_r = 0.05
    else:
        base_r = 0.08
    radii = [base_r, base_r / 4, base_r / 16]
    samples = {p: _collar_samples(d, ev, p, radii) for p in d.dom.punctures}

    def t_separated(sa, sb):
        gaps = []
        for ra, rb in zip(sa, sb):
            if ra["t_min"] > rb["t_max"]:
                gaps.append(ra["t_min"] - rb["t_max"])
            elif rb["t_min"] > ra["t_max"]:
                gaps.append(rb["t_min"] - ra["t_max"])
            else:
                gaps.append(-1.0)
        return gaps[-1] > 0 and gaps[-1] >= gaps[0] - 1e-9

    def xy_separated(sa, sb):
        a, b = sa[-1], sb[-1]
        return abs(a["xy_center"] - b["xy_center"]) > 3.0 * (a["xy_spread"] + b["xy_spread"]) + 1e-9

    def mixed_separated(s_exp, s_shr):
        a, b = s_exp[-1], s_shr[-1]
        return a["xy_min_abs"] > abs(b["xy_center"]) + b["xy_spread"] + 1e-9

    punct = list(d.dom.punctures)
    for i in range(len(punct)):
        for j in range(i + 1, len(punct)):
            p, q = punct[i], punct[j]
            sa, sb = samples[p], samples[q]
            if t_separated(sa, sb):
                reasons.append(f"ends {p!r}/{q!r}: separated in t")
                continue
            ga, gb = ends[p].growth, ends[q].growth
            if ga == "Shrinking" and gb == "Shrinking" and xy_separated(sa, sb):
                reasons.append(f"ends {p!r}/{q!r}: separated in (x, y)")
                continue
            if ga == "Expanding" and gb == "Shrinking" and mixed_separated(sa, sb):
                reasons.append(f"ends {p!r}/{q!r}: expanding collar outside shrinking spike")
                continue
            if gb == "Expanding" and ga == "Shrinking" and mixed_separated(sb, sa):
                reasons.append(f"ends {p!r}/{q!r}: expanding collar outside shrinking spike")
                continue
            return ProbeReport(
                "INCONCLUSIVE",
                reasons + [f"ends {p!r}/{q!r}: no separation certificate found"],
                {repr(k): v for k, v in samples.items()},
            )
    return ProbeReport("PASS", reasons, {repr(k): v for k, v in samples.items()})
