"""Degree bookkeeping and the three Osserman-type inequalities.

The report carries both the arithmetic state of each inequality and the
equality prediction read off the end types; for admissible data the two
must agree, which makes the classification theorems executable checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cxpoly import INFINITY, CPoly, GaussRat, RationalFn
from .errors import ConstantGauss, DegreeUncertain, NotNearInteger, UnsupportedType
from .ends import classify_all_ends
from .localanalysis import degree_numeric
from .sing import singular_points
from .wdata import WeierstrassData

__all__ = ["IneqState", "OssermanReport", "osserman_report", "omitted_values"]


@dataclass
class IneqState:
    lhs: int
    rhs: int
    equal: bool
    predicted_equal: bool

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def consistent(self) -> bool:
        return self.equal == self.predicted_equal


@dataclass
class OssermanReport:
    name: str
    n: int
    k: int
    chi: int
    deg_g: int
    deg_g_star: int
    d_list: list
    ineq1: IneqState
    ineq2: IneqState
    ineq3: IneqState
    riemann_roch_sum: int
    riemann_roch_ok: bool
    omitted_count: Optional[int]
    omitted: Optional[list]
    dg_bound: Optional[float]
    dg_bound_ok: Optional[bool]
    ends: list = field(default_factory=list)
    sing: list = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return self.ineq1.holds and self.ineq2.holds and self.ineq3.holds

    @property
    def all_consistent(self) -> bool:
        return (self.ineq1.consistent and self.ineq2.consistent
                and self.ineq3.consistent and self.riemann_roch_ok)


def _deg_g(d: WeierstrassData, tol: float = 0.05) -> int:
    if d.g.is_zero():
        return 0
    if d.g.is_exact:
        return d.g.rational().map_degree()
    try:
        return degree_numeric(d.g, d.dom, tol=tol)
    except NotNearInteger as exc:
        raise DegreeUncertain(str(exc)) from exc


def _deg_g_star(d: WeierstrassData, tol: float = 0.05) -> int:
    if d.omega.is_exact:
        rat, logs = d.omega.rational().antiderivative()
        if logs:
            raise DegreeUncertain("primitive of omega is multivalued")
        return rat.map_degree()
    if d.dual_gstar is None:
        raise UnsupportedType("no closed-form dual Gauss map recorded")
    try:
        return degree_numeric(d.dual_gstar, d.dom, tol=tol)
    except NotNearInteger as exc:
        raise DegreeUncertain(str(exc)) from exc


def osserman_report(d: WeierstrassData, degree_tol: float = 0.05) -> OssermanReport:
    d.require_valid()
    ends = classify_all_ends(d)
    sing = singular_points(d)
    n = len(ends)
    k = sum(1 for e in ends if e.growth == "Expanding")
    chi = d.dom.euler_characteristic
    deg_g = _deg_g(d, tol=degree_tol)
    deg_g_star = _deg_g_star(d, tol=degree_tol)
    d_list = [s.order for s in sing]

    lhs1 = (-sum(e.ord_omega for e in ends if e.growth == "Expanding")
            + sum(e.ord_omega for e in ends if e.growth == "Shrinking"))
    ineq1 = IneqState(
        lhs=lhs1, rhs=2 * k,
        equal=lhs1 == 2 * k,
        predicted_equal=all(e.embedded for e in ends),
    )
    rhs2 = n + sum(d_list)
    lhs2 = deg_g + deg_g_star
    ineq2 = IneqState(
        lhs=lhs2, rhs=rhs2,
        equal=lhs2 == rhs2,
        predicted_equal=all(
            e.asymp_type in ("Planar", "ExpandingCatenoidal", "ShrinkingCatenoidal")
            for e in ends
        ),
    )
    rhs3 = n + k - chi
    ineq3 = IneqState(
        lhs=deg_g, rhs=rhs3,
        equal=deg_g == rhs3,
        predicted_equal=all(
            e.asymp_type in ("Planar", "ExpandingCatenoidal") or e.layered_family
            for e in ends
        ),
    )
    rr_sum = sum(e.ord_omega for e in ends) + sum(d_list)
    omitted_count = None
    omitted = None
    bound = None
    bound_ok = None
    if d.dom.kind == "sphere" and d.g.is_exact and not d.g.is_zero() \
            and d.g.rational().map_degree() >= 1:
        omitted_count, omitted = omitted_values(d)
        bound = 3.0 - k / deg_g
        bound_ok = omitted_count <= 2 and omitted_count <= bound + 1e-12
    return OssermanReport(
        name=d.name,
        n=n, k=k, chi=chi,
        deg_g=deg_g, deg_g_star=deg_g_star,
        d_list=d_list,
        ineq1=ineq1, ineq2=ineq2, ineq3=ineq3,
        riemann_roch_sum=rr_sum,
        riemann_roch_ok=rr_sum == -chi,
        omitted_count=omitted_count,
        omitted=omitted,
        dg_bound=bound,
        dg_bound_ok=bound_ok,
        ends=ends,
        sing=sing,
    )


def _value_at_puncture(g: RationalFn, p):
    """g(p) on the sphere, exactly; INFINITY for a pole."""
    if p is INFINITY:
        dn, dd = int(g.num.degree), int(g.den.degree)
        if dn > dd:
            return INFINITY
        if dn < dd:
            return GaussRat(0)
        return g.num.leading() / g.den.leading()
    dv = g.den.eval_exact(p)
    if dv.is_zero():
        return INFINITY
    return g.num.eval_exact(p) / dv


def omitted_values(d: WeierstrassData):
    """Omitted values of a rational Gauss map on a punctured sphere.

    A value is omitted exactly when all of its preimages are punctures;
    since every omitted value is attained in the limit at some puncture,
    the candidate set {g(p) : p puncture} is exhaustive.
    """
    if d.dom.kind != "sphere" or not d.g.is_exact:
        raise UnsupportedType("omitted values need a rational Gauss map on the sphere")
    g = d.g.rational()
    if g.is_zero() or g.map_degree() == 0:
        raise ConstantGauss("the Gauss map is constant")
    deg = g.map_degree()
    candidates = []
    for p in d.dom.punctures:
        v = _value_at_puncture(g, p)
        if not any(_values_equal(v, w) for w in candidates):
            candidates.append(v)
    omitted = []
    finite_punctures = [p for p in d.dom.punctures if p is not INFINITY]
    inf_is_puncture = any(p is INFINITY for p in d.dom.punctures)
    for w in candidates:
        if w is INFINITY:
            pre = g.den
        else:
            pre = g.num - g.den * CPoly([w])
        inf_mult = deg - (int(pre.degree) if not pre.is_zero() else 0)
        if inf_mult > 0 and not inf_is_puncture:
            continue
        residual = pre
        for p in finite_punctures:
            m = residual.root_multiplicity(p)
            for _ in range(m):
                residual = residual // CPoly([-p, GaussRat(1)])
        if residual.degree >= 1:
            continue
        omitted.append(w)
    return len(omitted), omitted


def _values_equal(a, b) -> bool:
    if (a is INFINITY) or (b is INFINITY):
        return a is b
    return a == b
