import math

import numpy as np
import pytest

from zmcface.cxpoly import INFINITY
from zmcface.elliptic import wp, wp_prime
from zmcface.errors import DegenerateDual
from zmcface.fixtures import get
from zmcface.surface import (
    MeshConfig,
    SurfaceEvaluator,
    evaluate,
    evaluate_dual,
    mesh,
    obj_string,
    proper_embeddedness_probe,
)


def test_catenoid_closed_form():
    d = get("catenoid").data
    for z in (1.2 + 0.7j, -0.4 + 0.9j, 3.0 - 2.0j):
        t, x, y = evaluate(d, z)
        assert abs(t - 0.5 * math.log(abs(z) ** 2)) < 1e-12
        assert abs(x - z.real) < 1e-12 and abs(y - z.imag) < 1e-12


def test_umbrella1_closed_form():
    # (1/z, z dz) -> (u, (u^2-v^2)/2, u v)
    d = get("umbrella1").data
    for z in (0.5 + 0.25j, -1.0 + 2.0j):
        t, x, y = evaluate(d, z)
        u, v = z.real, z.imag
        assert abs(t - u) < 1e-12
        assert abs(x - 0.5 * (u * u - v * v)) < 1e-12
        assert abs(y - u * v) < 1e-12


def test_torus_closed_form():
    d = get("torus_basic").data
    z = 0.31 + 0.12j
    t, x, y = evaluate(d, z)
    val = wp_prime(z) / wp(z)
    assert abs(t - math.log(abs(wp(z)))) < 1e-10
    assert abs(complex(x, y) - val) < 1e-10


@pytest.mark.parametrize("name", [
    "catenoid", "bicatenoid", "mix_embedded", "mix_layered",
    "enneper_paraboloid", "inverse_enneper2", "umbrella2",
])
def test_exact_vs_path_strategies(name):
    d = get(name).data
    ex = SurfaceEvaluator(d, "exact")
    pa = SurfaceEvaluator(d, "path")
    ref = d.basepoint
    e0 = np.array(ex.evaluate(ref))
    p0 = np.array(pa.evaluate(ref))
    rng = np.random.default_rng(42)
    specials = [complex(p) for p in d.dom.punctures if p is not INFINITY]
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5))
        if any(abs(z - s) < 0.08 for s in specials):
            continue
        a = np.array(ex.evaluate(z)) - e0
        b = np.array(pa.evaluate(z)) - p0
        assert np.max(np.abs(a - b)) < 1e-8, f"{name} at {z}"
        checked += 1


def test_loop_around_puncture_leaves_f_unchanged():
    # integrating around a puncture changes the holomorphic primitive by
    # 2 pi i Res, but the real part (the surface) must return exactly
    d = get("bicatenoid").data
    pa = SurfaceEvaluator(d, "path")
    z = 0.5 + 0.0j
    direct = np.array(pa.evaluate(z))
    from zmcface.quad import integrate_polyline

    loop = [z, 1j * 0.5, -0.5 + 0j, -1j * 0.5, z]
    gw = d.g_omega
    phi_loop = integrate_polyline(lambda w: gw.eval(w), loop)
    assert abs(phi_loop.real) < 1e-9          # Re jump vanishes
    assert abs(phi_loop - 2j * np.pi * 1.0) < 1e-9  # residue 1 at 0
    omega_loop = integrate_polyline(lambda w: d.omega.eval(w), loop)
    assert abs(omega_loop) < 1e-9
    again = np.array(pa.evaluate(z))
    assert np.max(np.abs(direct - again)) < 1e-12


def test_dual_surface_harmonic_graph_formula():
    # graph of phi: dual is (x phi_x + y phi_y - phi, phi_x, phi_y)
    d = get("enneper_paraboloid").data  # phi = (x^2 - y^2)/2
    for z in (0.7 + 0.4j, -1.1 + 0.2j):
        x, y = z.real, z.imag
        t, fx, fy = evaluate_dual(d, z)
        phi = 0.5 * (x * x - y * y)
        assert abs(t - (x * x - y * y - phi)) < 1e-12
        assert abs(fx - x) < 1e-12
        assert abs(fy + y) < 1e-12


def test_dual_surface_plane_degenerate():
    with pytest.raises(DegenerateDual):
        evaluate_dual(get("plane").data, 0.5 + 0.5j)


def test_mesh_deterministic_obj():
    d = get("catenoid").data
    cfg = MeshConfig(r_min=0.05, r_max=20.0, n_angles=24, n_radial=12)
    s1 = obj_string(mesh(d, cfg))
    s2 = obj_string(mesh(d, cfg))
    assert s1 == s2
    assert s1.startswith("# zmcface mesh: catenoid")
    assert "v " in s1 and "f " in s1


def test_mesh_t_range_matches_log_radii():
    # bicatenoid has f0 = log|z| exactly, so the mesh t-range is known
    d = get("bicatenoid").data
    cfg = MeshConfig(r_min=0.05, r_max=20.0, n_angles=16, n_radial=10,
                     interior_n=5, interior_bound=1.9)
    m = mesh(d, cfg)
    ts = [v[0] for v in m.vertices if np.all(np.isfinite(v))]
    assert abs(min(ts) - math.log(0.05)) < 1e-9
    assert abs(max(ts) - math.log(20.0)) < 1e-9


def test_mesh_torus_grid():
    d = get("torus_basic").data
    cfg = MeshConfig(torus_n=21, torus_guard=0.08)
    m = mesh(d, cfg)
    assert len(m.faces) > 100
    assert len(m.markers) == 4  # the four cross caps


def test_inverse_enneper_implicit_equation():
    # m t (x^2+y^2)^m + Re((x+iy)^m) = 0 on the surface
    for mname, morder in (("inverse_enneper1", 1), ("inverse_enneper2", 2),
                          ("inverse_enneper3", 3)):
        d = get(mname).data
        cfg = MeshConfig(r_min=0.2, r_max=4.0, n_angles=16, n_radial=8,
                         interior_n=7, interior_bound=1.5)
        m = mesh(d, cfg)
        pts = [v for v in m.vertices if np.all(np.isfinite(v))]
        assert len(pts) >= 200
        worst = 0.0
        for t, x, y in pts[:400]:
            r2 = x * x + y * y
            phi = morder * t * r2**morder + ((x + 1j * y) ** morder).real
            scale = max(1.0, abs(morder * t * r2**morder),
                        abs(x + 1j * y) ** morder)
            worst = max(worst, abs(phi) / scale)
        assert worst < 1e-6


def test_conformality_in_degenerate_metric():
    # <f_u, f_u> = <f_v, f_v> and <f_u, f_v> = 0 where <.,.> ignores t
    for name in ("bicatenoid", "mix_embedded", "umbrella2"):
        ev = SurfaceEvaluator(get(name).data)
        h = 1e-5
        for z in (0.45 + 0.55j, -1.3 + 0.4j):
            fu = (np.array(ev.evaluate(z + h)) - np.array(ev.evaluate(z - h))) / (2 * h)
            fv = (np.array(ev.evaluate(z + 1j * h)) - np.array(ev.evaluate(z - 1j * h))) / (2 * h)
            ee = fu[1] ** 2 + fu[2] ** 2
            gg = fv[1] ** 2 + fv[2] ** 2
            ff = fu[1] * fv[1] + fu[2] * fv[2]
            scale = max(1.0, ee, gg)
            assert abs(ee - gg) < 1e-8 * scale, (name, z)
            assert abs(ff) < 1e-8 * scale, (name, z)


def test_homotopic_paths_agree():
    d = get("mix_embedded").data
    from zmcface.quad import integrate_polyline

    gw = d.g_omega
    a, b = 2.0 + 0.0j, -1.5 + 0.5j
    up = [a, 1.0 + 2.2j, b]      # both routes pass above the punctures 0, 1
    up2 = [a, 2.0 + 1.5j, -0.5 + 1.8j, b]
    v1 = integrate_polyline(lambda w: gw.eval(w), up)
    v2 = integrate_polyline(lambda w: gw.eval(w), up2)
    assert abs(v1 - v2) < 1e-9
    w1 = integrate_polyline(lambda w: d.omega.eval(w), up)
    w2 = integrate_polyline(lambda w: d.omega.eval(w), up2)
    assert abs(w1 - w2) < 1e-9


def test_probe_results():
    assert proper_embeddedness_probe(get("bicatenoid").data).result == "PASS"
    assert proper_embeddedness_probe(get("mix_embedded").data).result == "PASS"
    assert proper_embeddedness_probe(get("mix_layered").data).result == "INCONCLUSIVE"
    assert proper_embeddedness_probe(get("torus_split").data).result == "PASS"
    assert proper_embeddedness_probe(get("torus_basic").data).result == "PASS"
