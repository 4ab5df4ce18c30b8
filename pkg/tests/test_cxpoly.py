from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zmcface.cxpoly import (
    INFINITY,
    CPoly,
    GaussRat,
    RationalFn,
    antiderivative,
    map_degree,
    order_at,
    poly_gcd,
    rational_roots,
    reduce,
    residue_at,
    roots,
    square_free_decomposition,
)
from zmcface.errors import NonRationalPole, ZeroDenominator


def P(*coeffs):
    """Polynomial from coefficients, lowest degree first."""
    return CPoly(coeffs)


Z = CPoly([0, 1])
ONE = CPoly([1])


def euclid_gcd_oracle(a, b):
    """Independent textbook Euclid gcd, used only to check `reduce`."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


# --- GaussRat --------------------------------------------------------------

small_rats = st.fractions(
    min_value=-4, max_value=4, max_denominator=8
)
gauss = st.builds(GaussRat, small_rats, small_rats)


@given(gauss, gauss)
def test_gaussrat_add_sub_roundtrip(a, b):
    assert (a + b) - b == a


@given(gauss, gauss)
@settings(max_examples=200)
def test_gaussrat_mul_div_roundtrip(a, b):
    if b.is_zero():
        return
    assert (a * b) / b == a


def test_gaussrat_basics():
    i = GaussRat(0, 1)
    assert i * i == GaussRat(-1)
    assert (GaussRat(1, 1) / GaussRat(0, 1)) == GaussRat(1, -1)
    assert complex(GaussRat(Fraction(1, 2), Fraction(-3, 4))) == 0.5 - 0.75j


# --- reduce ----------------------------------------------------------------

def test_reduce_common_linear_factor():
    # (z^2-1)/(z-1) -> z+1
    r = reduce(P(-1, 0, 1), P(-1, 1))
    assert r.num == P(1, 1)
    assert r.den == ONE


def test_reduce_already_reduced():
    r = reduce(Z, ONE)
    assert r.num == Z and r.den == ONE


def test_reduce_cubic_against_euclid_oracle():
    num = P(0, -1, 0, 1)          # z^3 - z
    den = P(0, 0, -1) + P(0, 0, 0, 1)   # z^3 - z^2 = z^2 (z-1)
    g = euclid_gcd_oracle(num, den)
    assert g == (P(0, -1, 1))  # z(z-1) monic
    r = reduce(num, den)
    assert r.num == P(1, 1)   # z+1
    assert r.den == P(0, 1)   # z
    # function equality with the original
    assert r.num * den == num * r.den


def test_reduce_zero_denominator():
    with pytest.raises((ZeroDenominator, Exception)):
        reduce(Z, CPoly())


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=3))
@settings(max_examples=100)
def test_reduce_idempotent(a, b, c):
    num, den, extra = CPoly(a), CPoly(b), CPoly(c)
    if den.is_zero() or extra.is_zero():
        return
    r = reduce(num * extra, den * extra)
    r2 = reduce(r.num, r.den)
    assert r == r2
    # and it equals num/den as a function
    if not num.is_zero():
        assert r.num * den == num * r.den or reduce(num, den) == r


# --- derivative ------------------------------------------------------------

def test_derivative_one_over_z():
    r = reduce(ONE, Z)
    d = r.derivative()
    assert d == reduce(P(-1), P(0, 0, 1))


def test_derivative_quotient_rule_oracle():
    # z/(z^2-1): oracle builds the unreduced quotient rule directly
    num, den = Z, P(-1, 0, 1)
    oracle = RationalFn(
        num.derivative() * den - num * den.derivative(), den * den
    )
    r = reduce(num, den).derivative()
    assert r == oracle
    assert r == reduce(P(-1, 0, -1), (P(-1, 0, 1) * P(-1, 0, 1)))


def test_derivative_constant():
    assert reduce(P(5), ONE).derivative().is_zero()


# --- roots -----------------------------------------------------------------

def companion_roots_oracle(p):
    return np.roots([complex(c) for c in reversed(p.coeffs)])


def _match_multiset(got, expected, tol=1e-8):
    assert len(got) == len(expected)
    used = [False] * len(expected)
    for g in got:
        ok = False
        for k, e in enumerate(expected):
            if not used[k] and abs(g - e) < tol:
                used[k] = True
                ok = True
                break
        assert ok, f"root {g} unmatched in {expected}"


def test_roots_simple():
    rts = roots(P(-1, 0, 1))
    _match_multiset([r for r, m in rts for _ in range(m)], [1, -1])
    assert all(m == 1 for _, m in rts)


def test_roots_double_zero():
    rts = roots(P(0, 0, 1))
    assert len(rts) == 1
    z, m = rts[0]
    assert m == 2 and abs(z) < 1e-12


def test_roots_vs_companion_oracle():
    p = P(-1, 1) * P(1, 0, 1)  # (z-1)(z^2+1)
    got = [r for r, m in roots(p) for _ in range(m)]
    _match_multiset(got, list(companion_roots_oracle(p)))


def test_roots_residual_bound_and_multiplicity_stability():
    p = P(-2, 1) * P(-2, 1) * P(3, 1, 1)
    for tol in (1e-8, 1e-12):
        rts = roots(p, tol=tol)
        assert sorted(m for _, m in rts) == [1, 1, 2]
        for z, _ in rts:
            scale = sum(abs(complex(c)) * max(1.0, abs(z)) ** k
                        for k, c in enumerate(p.coeffs))
            assert abs(p(z)) <= tol * scale


def test_square_free_decomposition():
    p = P(-1, 1) * P(-1, 1) * P(-1, 1) * P(1, 1)
    dec = square_free_decomposition(p)
    assert dec == [(P(1, 1), 1), (P(-1, 1), 3)]
    # pure power
    dec2 = square_free_decomposition(P(0, 0, 0, 0, 1))
    assert dec2 == [(Z, 4)]


# --- order_at --------------------------------------------------------------

def test_order_at_examples():
    r = reduce(P(-1, 0, 1), P(0, 0, 1))  # (z^2-1)/z^2
    assert order_at(r, GaussRat(0)) == -2
    assert order_at(r, GaussRat(1)) == 1
    assert order_at(reduce(ONE, ONE), GaussRat(0)) == 0


def test_order_at_infinity_function_chart():
    # as functions: ord_inf = deg den - deg num
    assert order_at(reduce(ONE, Z), INFINITY) == 1
    assert order_at(reduce(Z, P(-1, 0, 1)), INFINITY) == 1
    assert order_at(reduce(P(0, 0, 1), ONE), INFINITY) == -2


@given(st.lists(st.integers(-2, 2), min_size=1, max_size=4),
       st.lists(st.integers(-2, 2), min_size=1, max_size=4))
@settings(max_examples=60)
def test_orders_balance(a, b):
    """Sum of orders over all sphere points is 0 for nonzero r."""
    num, den = CPoly(a), CPoly(b)
    if num.is_zero() or den.is_zero():
        return
    r = reduce(num, den)
    if r.is_zero():
        return
    total = r.order_at(INFINITY)
    pts, rest_n = rational_roots(r.num)
    for p, m in pts:
        total += m
    pts_d, rest_d = rational_roots(r.den)
    for p, m in pts_d:
        total -= m
    # non-rational roots counted by residual degrees
    total += int(rest_n.degree) if not rest_n.is_zero() else 0
    total -= int(rest_d.degree) if not rest_d.is_zero() else 0
    assert total == 0


# --- residue_at ------------------------------------------------------------

def test_residue_simple_pole():
    assert residue_at(reduce(ONE, Z), GaussRat(0)) == GaussRat(1)
    assert residue_at(reduce(ONE, P(-1, 1)), GaussRat(1)) == GaussRat(1)


def test_residue_no_inverse_term():
    # (z^2-1)/z^2 = 1 - z^-2: no z^-1 coefficient
    r = reduce(P(-1, 0, 1), P(0, 0, 1))
    assert residue_at(r, GaussRat(0)) == GaussRat(0)


def test_residue_partial_fraction_oracle():
    # r = (3z+2)/((z-1)(z+2)): residues a=(3+2)/3, b=(-6+2)/(-3)
    r = reduce(P(2, 3), P(-1, 1) * P(2, 1))
    assert residue_at(r, GaussRat(1)) == GaussRat(Fraction(5, 3))
    assert residue_at(r, GaussRat(-2)) == GaussRat(Fraction(4, 3))
    # sum of finite residues is 0 when deg num <= deg den - 2
    r2 = reduce(ONE, P(-1, 1) * P(2, 1))
    assert residue_at(r2, GaussRat(1)) + residue_at(r2, GaussRat(-2)) == GaussRat(0)


def test_residue_at_regular_point():
    assert residue_at(reduce(Z, ONE), GaussRat(3)) == GaussRat(0)


# --- antiderivative --------------------------------------------------------

def test_antiderivative_no_logs():
    # 1 - z^-2 -> z + 1/z
    r = reduce(P(-1, 0, 1), P(0, 0, 1))
    rat, logs = antiderivative(r)
    assert logs == []
    assert rat == reduce(P(1, 0, 1), Z)


def test_antiderivative_log_terms():
    rat, logs = antiderivative(reduce(ONE, Z))
    assert rat.is_zero()
    assert logs == [(GaussRat(0), GaussRat(1))]
    rat2, logs2 = antiderivative(reduce(ONE, P(-1, 1)))
    assert rat2.is_zero()
    assert logs2 == [(GaussRat(1), GaussRat(1))]


def test_antiderivative_differentiates_back():
    cases = [
        reduce(P(-1, 0, 1), P(0, 0, 1)),
        reduce(P(1, 0, 1), P(0, 0, 1)),
        reduce(P(2, 3), P(-1, 1) * P(2, 1) * P(2, 1)),
        reduce(P(0, 0, 1), P(-1, 1)),
    ]
    for r in cases:
        rat, logs = antiderivative(r)
        back = rat.derivative()
        for pole, c in logs:
            back = back + reduce(CPoly([c]), CPoly([-pole, GaussRat(1)]))
        assert back == r
        # polynomial part has zero constant term
        q, _ = divmod(rat.num, rat.den)
        if not q.is_zero():
            assert q.coeffs[0] == GaussRat(0) or rat.den != ONE


def test_antiderivative_nonrational_pole():
    with pytest.raises(NonRationalPole):
        antiderivative(reduce(ONE, P(-2, 0, 1)))  # poles at +-sqrt(2)


# --- map_degree ------------------------------------------------------------

def test_map_degree_examples():
    assert map_degree(reduce(ONE, Z)) == 1
    assert map_degree(reduce(Z, P(-1, 0, 1))) == 2
    # z^2/((z^2-1)(z-1)) reduces to z^2/((z-1)^2 (z+1)): degree 3
    den = P(-1, 0, 1) * P(-1, 1)
    assert map_degree(reduce(P(0, 0, 1), den)) == 3


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.lists(st.integers(-3, 3), min_size=1, max_size=4))
@settings(max_examples=60)
def test_map_degree_reciprocal_invariant(a, b):
    num, den = CPoly(a), CPoly(b)
    if num.is_zero() or den.is_zero():
        return
    r = reduce(num, den)
    if r.is_zero():
        return
    assert map_degree(r) == map_degree(r.reciprocal())


# --- chart and shift utilities ---------------------------------------------

def test_shift_exactness():
    p = P(1, 2, 3)
    q = p.shift(GaussRat(2))
    for x in (0, 1, -3):
        assert q.eval_exact(GaussRat(x)) == p.eval_exact(GaussRat(x + 2))


def test_invert_variable():
    r = reduce(P(-1, 0, 1), P(0, 0, 1))  # 1 - z^-2
    s = r.invert_variable()              # 1 - w^2
    assert s == reduce(P(1, 0, -1), ONE)


def test_poly_gcd_matches_oracle():
    a = P(-1, 1) * P(1, 1) * P(0, 1)
    b = P(-1, 1) * P(0, 0, 1)
    assert poly_gcd(a, b) == euclid_gcd_oracle(a, b) == P(0, -1, 1)
