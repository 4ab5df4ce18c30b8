"""Command-line interface: validation, classification, reports, meshes.

Exit codes: 0 success; 2 parse or validation failure; 3 theorem-check
mismatch (an inequality fails or an equality flag contradicts the end-type
prediction -- either a bug or a counterexample, stated loudly); 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__, fixtures
from .cxpoly import GaussRat, INFINITY
from .errors import (
    DegreeUncertain,
    NonConvergence,
    NotNearInteger,
    PathBlocked,
    QuadratureFailure,
    ZmcError,
)
from .osserman import osserman_report
from .regress import run_fixture
from .sing import singular_points
from .surface import MeshConfig, mesh, write_obj
from .ends import classify_all_ends

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_THEOREM = 3
EXIT_NUMERIC = 4

_NUMERIC_ERRORS = (DegreeUncertain, NonConvergence, NotNearInteger,
                   PathBlocked, QuadratureFailure)


def _point_str(p) -> str:
    if p is INFINITY:
        return "inf"
    if isinstance(p, GaussRat):
        return repr(p)
    c = complex(p)
    return f"{c.real:.12g}{c.imag:+.12g}i"


def _cnum(v):
    c = complex(v)
    return {"re": c.real, "im": c.imag}


def _validation_doc(rep):
    return {
        "ok": rep.ok,
        "compatibility": {
            "ok": rep.compat.ok,
            "common_zeros": [_point_str(p) for p in rep.compat.common_zeros],
            "unlisted_poles": [_point_str(p) for p in rep.compat.unlisted_poles],
            "messages": list(rep.compat.messages),
        },
        "period": {
            "ok": rep.period.ok,
            "residues": [
                {
                    "point": _point_str(e["point"]),
                    "res_omega": _cnum(e["res_omega"]),
                    "res_g_omega": _cnum(e["res_g_omega"]),
                }
                for e in rep.period.residue_table
            ],
            "cycles": {
                label: {kk: _cnum(vv) for kk, vv in entry.items()}
                for label, entry in rep.period.cycle_integrals.items()
            },
            "messages": list(rep.period.messages),
        },
    }


def _ends_doc(ends):
    return [
        {
            "point": _point_str(e.point),
            "type": e.asymp_type,
            "growth": e.growth,
            "embedded": e.embedded,
            "layered_family": e.layered_family,
            "ord_omega": e.ord_omega,
            "ord_omega_star": e.ord_omega_star,
            "ord_g_omega": e.ord_g_omega,
            "res_g_omega": _cnum(e.res_g_omega),
        }
        for e in ends
    ]


def _sing_doc(sing):
    return [
        {
            "point": _point_str(s.point),
            "order": s.order,
            "cross_cap": s.is_cross_cap,
            "whitney_det": s.whitney_det,
            "whitney_positive": s.whitney_positive,
            "corank": s.corank,
        }
        for s in sing
    ]


def _ineq_doc(st):
    return {"lhs": st.lhs, "rhs": st.rhs, "holds": st.holds,
            "equal": st.equal, "predicted_equal": st.predicted_equal}


def _osserman_doc(rep):
    return {
        "n": rep.n, "k": rep.k, "chi": rep.chi,
        "deg_g": rep.deg_g, "deg_g_star": rep.deg_g_star,
        "singular_orders": list(rep.d_list),
        "ineq1": _ineq_doc(rep.ineq1),
        "ineq2": _ineq_doc(rep.ineq2),
        "ineq3": _ineq_doc(rep.ineq3),
        "riemann_roch": {"sum": rep.riemann_roch_sum, "ok": rep.riemann_roch_ok},
        "omitted_values": None if rep.omitted_count is None else {
            "count": rep.omitted_count,
            "values": [_point_str(v) for v in rep.omitted],
            "bound": rep.dg_bound,
            "bound_ok": rep.dg_bound_ok,
        },
    }


def _load_source(src: str):
    if os.path.exists(src) or src.endswith(".toml"):
        return fixtures.load_fixture_file(src)
    return fixtures.get(src)


def _document(source_name, body, timings):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "zmcface", "version": __version__},
        "source": source_name,
    }
    doc.update(body)
    doc["timings"] = {k: round(v, 6) for k, v in timings.items()}
    return doc


def _emit(doc, as_json: bool):
    if as_json:
        print(json.dumps(doc, indent=2))
        return
    _pretty(doc)


def _pretty(doc):
    print(f"source: {doc['source']}")
    if "validation" in doc:
        v = doc["validation"]
        print(f"validation: {'ok' if v['ok'] else 'FAILED'}")
        for msg in v["compatibility"]["messages"] + v["period"]["messages"]:
            print(f"  ! {msg}")
        for e in v["period"]["residues"]:
            print(f"  residue at {e['point']}: omega = {e['res_omega']['re']:.3g}"
                  f"{e['res_omega']['im']:+.3g}i, g*omega = {e['res_g_omega']['re']:.6g}"
                  f"{e['res_g_omega']['im']:+.3g}i")
    for e in doc.get("ends", []):
        star = "" if e["embedded"] else " (not embedded)"
        print(f"end {e['point']}: {e['type']}{star}, {e['growth']}, "
              f"ord(omega) = {e['ord_omega']}")
    for s in doc.get("singular_points", []):
        kind = "cross cap" if s["cross_cap"] else f"order-{s['order']} singular point"
        print(f"singular point {s['point']}: {kind}, whitney = {s['whitney_det']:.4g}")
    if "osserman" in doc:
        o = doc["osserman"]
        print(f"n = {o['n']}, k = {o['k']}, chi = {o['chi']}, "
              f"deg(g) = {o['deg_g']}, deg(g*) = {o['deg_g_star']}")
        for idx in (1, 2, 3):
            st = o[f"ineq{idx}"]
            rel = "=" if st["equal"] else (">" if st["lhs"] > st["rhs"] else "<")
            flag = "" if st["equal"] == st["predicted_equal"] else "  <-- MISMATCH"
            print(f"inequality {idx}: {st['lhs']} {rel} {st['rhs']} "
                  f"(predicted equality: {st['predicted_equal']}){flag}")
        rr = o["riemann_roch"]
        print(f"order ledger: sum = {rr['sum']} ({'ok' if rr['ok'] else 'BROKEN'})")
        if o.get("omitted_values"):
            om = o["omitted_values"]
            print(f"omitted values: {om['count']} {om['values']} "
                  f"(bound {om['bound']:.3f})")


def cmd_check(args) -> int:
    fx = _load_source(args.src)
    t0 = time.time()
    rep = fx.data.validate()
    doc = _document(fx.name, {"validation": _validation_doc(rep)},
                    {"validate": time.time() - t0})
    _emit(doc, args.json)
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_classify(args) -> int:
    fx = _load_source(args.src)
    timings = {}
    t0 = time.time()
    rep = fx.data.validate()
    timings["validate"] = time.time() - t0
    if not rep.ok:
        _emit(_document(fx.name, {"validation": _validation_doc(rep)}, timings),
              args.json)
        return EXIT_INVALID
    t0 = time.time()
    ends = classify_all_ends(fx.data)
    sing = singular_points(fx.data, h=args.whitney_h)
    timings["classify"] = time.time() - t0
    doc = _document(fx.name, {
        "validation": _validation_doc(rep),
        "ends": _ends_doc(ends),
        "singular_points": _sing_doc(sing),
    }, timings)
    _emit(doc, args.json)
    return EXIT_OK


def cmd_osserman(args) -> int:
    fx = _load_source(args.src)
    timings = {}
    t0 = time.time()
    vrep = fx.data.validate()
    timings["validate"] = time.time() - t0
    if not vrep.ok:
        _emit(_document(fx.name, {"validation": _validation_doc(vrep)}, timings),
              args.json)
        return EXIT_INVALID
    t0 = time.time()
    rep = osserman_report(fx.data, degree_tol=args.degree_tol)
    timings["report"] = time.time() - t0
    doc = _document(fx.name, {
        "validation": _validation_doc(vrep),
        "ends": _ends_doc(rep.ends),
        "singular_points": _sing_doc(rep.sing),
        "osserman": _osserman_doc(rep),
    }, timings)
    _emit(doc, args.json)
    if not (rep.all_hold and rep.all_consistent):
        print(
            "THEOREM CHECK FAILED: an Osserman-type inequality is violated or an "
            "equality flag contradicts the end-type prediction. Either this build "
            "has a bug or the input is a counterexample; both deserve attention.",
            file=sys.stderr,
        )
        return EXIT_THEOREM
    return EXIT_OK


def cmd_mesh(args) -> int:
    fx = _load_source(args.src)
    if not fx.data.validate().ok:
        print("validation failed; no mesh written", file=sys.stderr)
        return EXIT_INVALID
    cfg = MeshConfig(r_min=args.rmin, r_max=args.rmax, n_angles=args.angles)
    m = mesh(fx.data, cfg)
    with open(args.out, "w") as fh:
        write_obj(m, fh)
    print(f"wrote {args.out}: {len(m.vertices)} vertices, {len(m.faces)} faces",
          file=sys.stderr)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in fixtures.names():
            print(name)
        return EXIT_OK
    # run-all
    cat = fixtures.catalogue()
    workers = int(os.environ.get("ZMC_THREADS", "0")) or min(4, os.cpu_count() or 1)
    results = []
    t0 = time.time()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for outcome in pool.map(
            lambda fx: run_fixture(fx, include_probe=args.probe), cat
        ):
            results.append(outcome)
    total = time.time() - t0
    any_invalid = False
    any_mismatch = False
    doc_entries = []
    for oc in results:
        status = "ok" if oc.ok else "MISMATCH"
        if not oc.ok:
            if oc.validation is not None and not oc.validation.ok:
                any_invalid = True
            else:
                any_mismatch = True
        doc_entries.append({
            "fixture": oc.name,
            "ok": oc.ok,
            "mismatches": list(oc.mismatches),
            "timings": {k: round(v, 6) for k, v in oc.timings.items()},
        })
        if not args.json:
            print(f"{oc.name:24s} {status}")
            for msg in oc.mismatches:
                print(f"    - {msg}")
    if args.json:
        print(json.dumps({
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "zmcface", "version": __version__},
            "source": "run-all",
            "results": doc_entries,
            "timings": {"total": round(total, 6)},
        }, indent=2))
    else:
        print(f"total: {len(results)} fixtures in {total:.2f}s")
    if any_invalid:
        return EXIT_INVALID
    if any_mismatch:
        return EXIT_THEOREM
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zmcface",
        description="Zero-mean-curvature faces in isotropic 3-space: "
                    "validate, classify, report, mesh.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate the compatibility and period conditions")
    p.add_argument("src", help="fixture name or TOML path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="classify ends and singular points")
    p.add_argument("src")
    p.add_argument("--json", action="store_true")
    p.add_argument("--whitney-h", type=float, default=1e-3,
                   help="finite-difference step for the cross-cap check")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("osserman", help="full degree/inequality report")
    p.add_argument("src")
    p.add_argument("--json", action="store_true")
    p.add_argument("--degree-tol", type=float, default=0.05,
                   help="how close the curvature integral must sit to an integer")
    p.set_defaults(func=cmd_osserman)

    p = sub.add_parser("mesh", help="export an OBJ mesh")
    p.add_argument("src")
    p.add_argument("--out", required=True)
    p.add_argument("--rmin", type=float, default=0.05)
    p.add_argument("--rmax", type=float, default=20.0)
    p.add_argument("--angles", type=int, default=96)
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("fixtures", help="list fixtures or run the whole catalogue")
    p.add_argument("action", choices=["list", "run-all"])
    p.add_argument("--json", action="store_true")
    p.add_argument("--probe", action="store_true",
                   help="also run the embeddedness probe")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ZmcError, KeyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
