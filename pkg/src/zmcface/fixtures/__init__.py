"""Catalogue of reference surfaces with expected classification outcomes.

Each fixture is a TOML document: domain, punctures, Weierstrass data as
expression strings, optional closed forms, and an `expected` table whose
entries carry a `basis` tag recording whether the value is a known
closed-form fact about the surface or was derived from a named oracle.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..exprparse import parse_carrier, parse_constant, parse_point
from ..localanalysis import DomainSpec
from ..wdata import WeierstrassData

__all__ = ["Fixture", "catalogue", "get", "names", "load_fixture_file"]


@dataclass
class Fixture:
    name: str
    data: WeierstrassData
    expected: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _build(doc: dict) -> Fixture:
    name = doc["name"]
    consts: dict = {}
    for key, expr in (doc.get("constants") or {}).items():
        consts[key] = parse_constant(expr, consts)
    dom = DomainSpec(doc["domain"], tuple(parse_point(s) for s in doc["punctures"]))
    g = parse_carrier(doc["g"], consts)
    omega = parse_carrier(doc["omega"], consts)
    cf = doc.get("closed_form") or {}
    kw = {}
    if "f0_log_abs_of" in cf:
        kw["f0_log_abs_of"] = parse_carrier(cf["f0_log_abs_of"], consts)
    if "f12" in cf:
        kw["f12_closed"] = parse_carrier(cf["f12"], consts)
    if "dual_gstar" in cf:
        kw["dual_gstar"] = parse_carrier(cf["dual_gstar"], consts)
    if "basepoint" in doc:
        kw["basepoint"] = complex(parse_constant(doc["basepoint"], consts))
    data = WeierstrassData(dom, g, omega, name=name, **kw)
    return Fixture(
        name=name,
        data=data,
        expected=doc.get("expected") or {},
        constants=consts,
        raw=doc,
    )


def load_fixture_file(path) -> Fixture:
    with open(path, "rb") as fh:
        return _build(tomllib.load(fh))


def _iter_data_files():
    root = resources.files(__package__) / "data"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".toml"):
            yield entry


def catalogue() -> list[Fixture]:
    out = []
    for entry in _iter_data_files():
        with entry.open("rb") as fh:
            out.append(_build(tomllib.load(fh)))
    return out


def names() -> list[str]:
    return [fx.name for fx in catalogue()]


def get(name: str) -> Fixture:
    for entry in _iter_data_files():
        with entry.open("rb") as fh:
            doc = tomllib.load(fh)
        if doc.get("name") == name:
            return _build(doc)
    raise KeyError(f"no fixture named {name!r}")
