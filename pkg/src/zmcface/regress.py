"""Fixture regression: compute everything, compare against expected tables."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .cxpoly import INFINITY
from .exprparse import parse_carrier, parse_constant, parse_point
from .fixtures import Fixture
from .localanalysis import points_equal
from .osserman import OssermanReport, osserman_report
from .surface import proper_embeddedness_probe
from .wdata import dual_data

__all__ = ["FixtureOutcome", "run_fixture"]


@dataclass
class FixtureOutcome:
    name: str
    ok: bool
    mismatches: list = field(default_factory=list)
    validation: Optional[object] = None
    report: Optional[OssermanReport] = None
    probe: Optional[object] = None
    timings: dict = field(default_factory=dict)


def _find_end(reports, point, torus):
    for e in reports:
        if points_equal(e.point, point, tol=1e-6, torus=torus):
            return e
    return None


def run_fixture(fx: Fixture, include_probe: bool = False) -> FixtureOutcome:
    out = FixtureOutcome(fx.name, ok=True)
    torus = fx.data.dom.kind == "torus"
    t0 = time.time()
    validation = fx.data.validate()
    out.validation = validation
    out.timings["validate"] = time.time() - t0
    if not validation.ok:
        out.ok = False
        out.mismatches.append(f"validation failed: {validation.summary()}")
        return out

    t0 = time.time()
    rep = osserman_report(fx.data)
    out.report = rep
    out.timings["report"] = time.time() - t0

    exp = fx.expected
    consts = fx.constants

    for eexp in exp.get("ends", []):
        point = parse_point(eexp["point"])
        got = _find_end(rep.ends, point, torus)
        if got is None:
            out.mismatches.append(f"end {eexp['point']}: not classified")
            continue
        for key, attr in (("type", "asymp_type"), ("growth", "growth"),
                          ("embedded", "embedded"), ("ord_omega", "ord_omega"),
                          ("ord_omega_star", "ord_omega_star"),
                          ("ord_g_omega", "ord_g_omega")):
            if key in eexp and getattr(got, attr) != eexp[key]:
                out.mismatches.append(
                    f"end {eexp['point']}: {key} = {getattr(got, attr)!r}, "
                    f"expected {eexp[key]!r}"
                )
        if "res_g_omega" in eexp:
            want = complex(parse_constant(str(eexp["res_g_omega"]), consts))
            if abs(complex(got.res_g_omega) - want) > 1e-6:
                out.mismatches.append(
                    f"end {eexp['point']}: res(g omega) = {got.res_g_omega}, "
                    f"expected {want}"
                )

    sing_exp = exp.get("sing", [])
    if len(sing_exp) != len(rep.sing):
        out.mismatches.append(
            f"singular points: found {len(rep.sing)}, expected {len(sing_exp)}"
        )
    for sexp in sing_exp:
        point = parse_point(sexp["point"])
        got = None
        for s in rep.sing:
            if points_equal(s.point, point, tol=1e-6, torus=torus):
                got = s
                break
        if got is None:
            out.mismatches.append(f"singular point {sexp['point']}: not found")
            continue
        if got.order != sexp["order"]:
            out.mismatches.append(
                f"singular point {sexp['point']}: order {got.order}, "
                f"expected {sexp['order']}"
            )
        if got.is_cross_cap != sexp["cross_cap"]:
            out.mismatches.append(
                f"singular point {sexp['point']}: cross_cap {got.is_cross_cap}, "
                f"expected {sexp['cross_cap']}"
            )
        if got.whitney_positive is not None and got.whitney_positive != got.is_cross_cap:
            out.mismatches.append(
                f"singular point {sexp['point']}: Whitney check disagrees with the order criterion"
            )

    oexp = exp.get("osserman", {})
    for key, attr in (("n", "n"), ("k", "k"), ("chi", "chi"),
                      ("deg_g", "deg_g"), ("deg_g_star", "deg_g_star")):
        if key in oexp and getattr(rep, attr) != oexp[key]:
            out.mismatches.append(
                f"osserman: {key} = {getattr(rep, attr)}, expected {oexp[key]}"
            )
    for idx in (1, 2, 3):
        st = getattr(rep, f"ineq{idx}")
        for part in ("lhs", "rhs", "equal"):
            key = f"ineq{idx}_{part}"
            if key in oexp and getattr(st, part) != oexp[key]:
                out.mismatches.append(
                    f"osserman: {key} = {getattr(st, part)}, expected {oexp[key]}"
                )
        if not st.holds:
            out.mismatches.append(f"osserman: inequality {idx} violated")
        if not st.consistent:
            out.mismatches.append(
                f"osserman: inequality {idx} equality flag does not match the "
                f"end-type prediction"
            )
    if not rep.riemann_roch_ok:
        out.mismatches.append(
            f"osserman: order ledger sum {rep.riemann_roch_sum} != {-rep.chi}"
        )

    if "omitted" in exp and rep.omitted_count is not None:
        want_count = exp["omitted"]["count"]
        if rep.omitted_count != want_count:
            out.mismatches.append(
                f"omitted values: count {rep.omitted_count}, expected {want_count}"
            )
        want_vals = [parse_point(s) for s in exp["omitted"].get("values", [])]
        got_vals = list(rep.omitted or [])
        for w in want_vals:
            if not any(_omit_eq(w, v) for v in got_vals):
                out.mismatches.append(f"omitted values: {w!r} not reported")
        if rep.dg_bound_ok is False:
            out.mismatches.append("omitted values: bound violated")

    if "dual" in exp:
        dd = dual_data(fx.data)
        want_g = parse_carrier(exp["dual"]["g_star"], consts)
        want_w = parse_carrier(exp["dual"]["omega_star"], consts)
        if dd.g.rational() != want_g.rational():
            out.mismatches.append("dual: g_star mismatch")
        if dd.omega.rational() != want_w.rational():
            out.mismatches.append("dual: omega_star mismatch")

    if include_probe and "probe" in exp:
        t0 = time.time()
        probe = proper_embeddedness_probe(fx.data)
        out.probe = probe
        out.timings["probe"] = time.time() - t0
        if probe.result != exp["probe"]["result"]:
            out.mismatches.append(
                f"probe: {probe.result}, expected {exp['probe']['result']}"
            )

    out.ok = not out.mismatches
    return out


def _omit_eq(a, b) -> bool:
    if (a is INFINITY) or (b is INFINITY):
        return a is b
    return a == b
