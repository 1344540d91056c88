import random

import pytest

from ellevel.algebra import MultiPoly, rat, sym
from ellevel.levels import level_exponential, level_invariants
from ellevel.weierstrass import WeierstrassContext
from ellevel.wring import (
    AssertionReport, WContext, WPoly, WRational, assertion_suite,
    closed_form, expand_terms, jet, wrat_expand,
)

g2, g3 = sym("g2"), sym("g3")
alpha, beta, gamma = sym("alpha"), sym("beta"), sym("gamma")
a, b = sym("a"), sym("b")


@pytest.fixture(scope="module")
def ctx():
    return WContext(g2, g3)


def random_wpoly(ctx, rng, qmax=2):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        key = (rng.randint(0, 2), rng.randint(0, qmax))
        coeff = MultiPoly.monomial(rat(rng.randint(-4, 4), rng.randint(1, 3)),
                                   {"a": rng.randint(0, 2)})
        terms[key] = terms.get(key, MultiPoly.zero()) + coeff
    return terms


# -- reduction ---------------------------------------------------------------

def test_q_square_rewrite(ctx):
    q2 = WPoly.Q(ctx) * WPoly.Q(ctx)
    assert q2 == WPoly.from_terms(ctx, {(3, 0): 4, (1, 0): -g2, (0, 0): -g3})


def test_q_cube_rewrite(ctx):
    q3 = WPoly.Q(ctx) ** 3
    cubic_q = WPoly.from_terms(ctx, {(3, 1): 4, (1, 1): -g2, (0, 1): -g3})
    assert q3 == cubic_q
    assert all(q <= 1 for _, q in q3.terms)


def test_reduce_idempotent(ctx):
    rng = random.Random(3)
    for _ in range(50):
        terms = random_wpoly(ctx, rng, qmax=3)
        p = WPoly.from_terms(ctx, terms)
        again = WPoly.from_terms(ctx, p.terms)
        assert p == again


def test_derivative_rules(ctx):
    P, Q = WPoly.P(ctx), WPoly.Q(ctx)
    assert P.derivative() == Q
    assert Q.derivative() == WPoly.from_terms(ctx, {(2, 0): 6, (0, 0): -g2 / 2})
    # differentiating Q^2 agrees with differentiating its reduced form
    lhs = (Q * Q).derivative()
    rhs = WPoly.from_terms(ctx, {(2, 0): 12, (0, 0): -g2}) * Q
    assert lhs == rhs


def test_field_inverse(ctx):
    rng = random.Random(5)
    one = WRational(WPoly.const(ctx, 1), WPoly.const(ctx, 1))
    for _ in range(20):
        p = WPoly.from_terms(ctx, random_wpoly(ctx, rng))
        if p.is_zero:
            continue
        x = WRational(p, WPoly.const(ctx, 1) + WPoly.P(ctx))
        assert x / x == one
    with pytest.raises(ZeroDivisionError):
        one / WRational(WPoly.const(ctx, 0), WPoly.const(ctx, 1))
    with pytest.raises(ZeroDivisionError):
        WRational(WPoly.P(ctx), WPoly.const(ctx, 0))


def test_jet_matches_quotient_rule(ctx):
    P, Q = WPoly.P(ctx), WPoly.Q(ctx)
    f = WRational(Q + P * 2, P * P + WPoly.const(ctx, 1))
    u, d = jet(f, 2)
    d1 = f.derivative()
    assert WRational(u[1], d * d) == d1
    assert WRational(u[2], d * d * d) == d1.derivative()


# -- expansion ----------------------------------------------------------------

def test_expand_p_is_wp_series(ctx):
    s = expand_terms({(1, 0): MultiPoly.const(1)}, ctx, 8)
    ref = WeierstrassContext(g2, g3, 8).wp
    assert (s - ref).is_zero_through(8)


def test_expansion_commutes_with_reduction(ctx):
    rng = random.Random(9)
    for _ in range(25):
        raw = random_wpoly(ctx, rng, qmax=3)
        reduced = WPoly.from_terms(ctx, raw)
        s_raw = expand_terms(raw, ctx, 6)
        s_red = expand_terms(reduced.terms, ctx, 6)
        assert (s_raw - s_red).is_zero_through(6)


def test_cross_multiplication_agrees_with_series(ctx):
    rng = random.Random(13)
    P = WPoly.P(ctx)
    one = WPoly.const(ctx, 1)
    for _ in range(15):
        na = WPoly.from_terms(ctx, random_wpoly(ctx, rng))
        nb = WPoly.from_terms(ctx, random_wpoly(ctx, rng))
        x = WRational(na, one + P * P)
        y = WRational(nb, one + P * P)
        exact_eq = (x == y)
        sx = wrat_expand(x, 6) if not x.den.is_zero else None
        sy = wrat_expand(y, 6)
        series_eq = (sx - sy).is_zero_through(4)
        assert exact_eq == series_eq


# -- closed forms -----------------------------------------------------------------

def test_level4_numerator_contains_square_term():
    f4 = closed_form("4").func
    # the -(1/32) Q (4P + 3 alpha^2 - beta)^2 part contributes -1/2 P^2 Q
    assert f4.num.terms[(2, 1)] == MultiPoly.const(rat(-1, 2))


def test_level3_form_structure():
    f3 = closed_form("3").func
    assert f3.num == WPoly.from_terms(
        f3.ctx, {(1, 0): -6, (0, 0): -6 * alpha**2})
    assert f3.den == WPoly.from_terms(
        f3.ctx, {(0, 1): 3, (1, 0): 6 * alpha, (0, 0): -(2 * alpha**3 + gamma)})


def test_level2_ex3_context():
    f = closed_form("2-ex3")
    assert f.func.ctx.g2 == -4 * (a**2 - 2 * a * b - 2 * b**2)
    assert f.func.ctx.g3 == 4 * b * (a**2 - 2 * a * b - b**2)
    # c = 2b - a appears in the denominator constant term: Q*(P - c)
    assert f.func.den.terms[(0, 1)] == -(2 * b - a)


def test_level4_expansion_matches_series():
    s = wrat_expand(closed_form("4").func, 5)
    assert s.coefficient(1) == MultiPoly.const(1)
    assert s.coefficient(2) == alpha
    assert s.coefficient(3) == (alpha**2 + beta) / 2
    assert s.coefficient(4) == -5 * alpha * (alpha**2 - beta) / 2
    assert s.coefficient(5) == -(233 * alpha**4 - 186 * alpha**2 * beta
                                 - 3 * beta**2) / 40


def test_level3_expansion_matches_series():
    s = wrat_expand(closed_form("3").func, 5)
    ref = level_exponential(3, 5)
    assert (s - ref).is_zero_through(5)


def test_level2_expansions_are_odd_unit_series():
    for name in ("2-ex1", "2-ex2", "2-ex3"):
        s = wrat_expand(closed_form(name).func, 6)
        assert s.coefficient(1) == MultiPoly.const(1)
        assert s.coefficient(2).is_zero
        assert s.coefficient(4).is_zero


def test_level4_context_invariants():
    ctx4 = closed_form("4").func.ctx
    assert -4 * ctx4.g2 == 13 * alpha**4 - 6 * alpha**2 * beta - 3 * beta**2
    assert 8 * ctx4.g3 == (alpha**2 - beta) * (17 * alpha**4
                                               - 14 * alpha**2 * beta + beta**2)


# -- the assertion suite ------------------------------------------------------------

@pytest.mark.parametrize("name", ["feq4", "series4", "end4", "ode3", "ode2"])
def test_assertions_pass_exactly(name):
    rep = assertion_suite(name)
    assert rep.passed, f"{name}: residual {rep.residual}"
    assert rep.residual == "0"
    assert rep.series_checked


def test_assertion_report_json():
    rep = assertion_suite("series4")
    assert rep.to_json() == {"assertion": "series4", "status": "pass",
                             "residual": "0"}


def test_unknown_assertion():
    with pytest.raises(ValueError):
        assertion_suite("nope")
