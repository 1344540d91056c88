import pytest

from ellevel.algebra import MultiPoly, sym
from ellevel.formalgroup import (
    ABPair, bivariate_to_json, buchstaber_residual, extract_AB,
    fg_axiom_check, fg_from_exp, level_form_residual, solve_square_relation,
    square_relation_residual,
)
from ellevel.levels import level_exponential
from ellevel.multiseries import MultiSeries, compose_pair
from ellevel.series import (
    LaurentSeries, krichever_from_ode, series_compose, series_exp,
)

alpha, beta, gamma, lam = sym("alpha"), sym("beta"), sym("gamma"), sym("lambda")
X = LaurentSeries.x()


@pytest.fixture(scope="module")
def f_generic():
    return krichever_from_ode(alpha, beta, gamma, lam, 12)


@pytest.fixture(scope="module")
def ab_generic(f_generic):
    return extract_AB(f_generic)


# -- group law from an exponential -------------------------------------------

def test_additive_law():
    F = fg_from_exp(X.truncate(8), 6)
    u = MultiSeries.variable(0, 2, 6)
    v = MultiSeries.variable(1, 2, 6)
    assert (F - (u + v)).is_zero_through(6)


def test_multiplicative_law_sanity():
    # f = e^x - 1 gives F = u + v + uv
    f = series_exp(LaurentSeries.from_terms({1: 1}), order=9) - 1
    F = fg_from_exp(f, 6)
    got = sorted(((i, j), p.text()) for _, (i, j), p in F.terms())
    assert got == [((0, 1), "1"), ((1, 0), "1"), ((1, 1), "1")]


def test_level2_law_shape():
    # for the odd exponential, F * (u B(v) - v B(u)) = u^2 - v^2
    f2 = level_exponential(2, 12)
    ab = extract_AB(f2)
    assert level_form_residual(2, ab).is_zero_through(10)
    res = buchstaber_residual(fg_from_exp(f2, 8), ab)
    assert res.is_zero_through(8)


def test_addition_law_direct(f_generic):
    # F(f(x), f(y)) = f(x+y) as a series in (x, y)
    cap = 7
    F = fg_from_exp(f_generic, cap)
    fx = MultiSeries.from_univariate(f_generic, [1, 0], 2, cap)
    fy = MultiSeries.from_univariate(f_generic, [0, 1], 2, cap)
    lhs = compose_pair(F, fx, fy, cap=cap)
    rhs = MultiSeries.from_univariate(f_generic, [1, 1], 2, cap)
    assert (lhs - rhs).is_zero_through(cap)


# -- axiom checks ---------------------------------------------------------------

def test_axioms_trivial():
    F = fg_from_exp(X.truncate(10), 8)
    rep = fg_axiom_check(F)
    assert rep.all_ok and rep.assoc_cap == 6


def test_axioms_level4():
    F = fg_from_exp(level_exponential(4, 12), 8)
    rep = fg_axiom_check(F)
    assert rep.all_ok
    assert not rep.failures


def test_axioms_negative_control():
    F = fg_from_exp(level_exponential(4, 12), 8)
    # corrupt the (2,1) coefficient: commutativity must fail there
    bad = MultiSeries(2, F.cap, {d: dict(c) for d, c in F.comps.items()})
    key21 = (2 << 8) | 1
    comp3 = bad.comps.setdefault(3, {})
    comp3[key21] = comp3.get(key21, MultiPoly.zero()) + 1
    rep = fg_axiom_check(bad)
    assert not rep.commutative_ok
    assert ("commutativity", (1, 2)) in rep.failures or \
        ("commutativity", (2, 1)) in rep.failures


# -- A/B extraction ---------------------------------------------------------------

def test_extract_trivial():
    ab = extract_AB(X.truncate(10))
    assert ab.A1.is_zero and ab.B2.is_zero
    assert (ab.A - 1).is_zero_through(ab.A.trunc)
    assert (ab.B - 1).is_zero_through(ab.B.trunc)


def test_extract_level4_constants():
    ab = extract_AB(level_exponential(4, 12))
    assert ab.A1 == 2 * alpha
    assert -2 * ab.B2 == alpha**2 - 3 * beta


def test_normalization(ab_generic):
    assert ab_generic.A.coefficient(0) == MultiPoly.const(1)
    assert ab_generic.B.coefficient(0) == MultiPoly.const(1)
    assert ab_generic.A.coefficient(2).is_zero  # A_2 = 0
    assert ab_generic.B.coefficient(1).is_zero  # B_1 = 0


def test_extract_idempotent(ab_generic, f_generic):
    # rebuild the exponential from (A1, B) through f' = B(f) + A1 f,
    # then re-extract: the pair must come back unchanged
    order = ab_generic.B.trunc
    coeffs = {1: MultiPoly.const(1)}
    for k in range(1, order):
        f = LaurentSeries(dict(coeffs), k)
        rhs = series_compose(ab_generic.B.rename("x"), f) + f * ab_generic.A1
        coeffs[k + 1] = rhs.coefficient(k) / (k + 1)
    rebuilt = LaurentSeries({d: p for d, p in coeffs.items() if p}, order)
    assert (rebuilt - f_generic).is_zero_through(order)
    ab2 = extract_AB(rebuilt)
    assert ab2.A1 == ab_generic.A1 and ab2.B2 == ab_generic.B2
    assert (ab2.A - ab_generic.A).is_zero_through(ab2.A.trunc)


# -- the rational form -------------------------------------------------------------

def test_buchstaber_residual_generic(f_generic, ab_generic):
    F = fg_from_exp(f_generic, 8)
    assert buchstaber_residual(F, ab_generic).is_zero_through(8)


def test_buchstaber_residual_additive():
    one = LaurentSeries.one(6, "u")
    ab = ABPair(one, one, MultiPoly.zero(), MultiPoly.zero())
    F = fg_from_exp(X.truncate(8), 6)
    assert buchstaber_residual(F, ab).is_zero_through(6)


def test_buchstaber_sensitivity(f_generic, ab_generic):
    # perturbing the u^3 coefficient of A must break the identity
    F = fg_from_exp(f_generic, 8)
    a_bad = ab_generic.A + LaurentSeries.from_terms({3: 1}, var="u")
    bad = ABPair(a_bad, ab_generic.B, ab_generic.A1, ab_generic.B2)
    res = buchstaber_residual(F, bad)
    assert not res.is_zero_through(8)
    assert res.first_nonzero()[0] == 5  # u^2 v^3 and u^3 v^2


# -- level conditions ---------------------------------------------------------------

def test_level3_form():
    ab = extract_AB(level_exponential(3, 14))
    assert level_form_residual(3, ab).is_zero_through(12)


def test_level4_form():
    ab = extract_AB(level_exponential(4, 14))
    assert level_form_residual(4, ab).is_zero_through(12)


def test_level4_form_fails_generically(ab_generic):
    res = level_form_residual(4, ab_generic)
    first = min(res.coeffs)
    assert first == 3
    assert res.coeffs[first] == -(gamma - 16 * alpha**3 + 12 * alpha * beta) * 4 / 3
    # lambda enters the failure: the order-6 coefficient depends on it
    assert res.coefficient(6).degree_in("lambda") == 1


def test_level4_trivial_point():
    ab = extract_AB(level_exponential(4, 10))
    zero_pt = {"alpha": 0, "beta": 0}
    a0 = ab.A.substitute(zero_pt)
    b0 = ab.B.substitute(zero_pt)
    assert (a0 - 1).is_zero_through(a0.trunc)
    assert (b0 - 1).is_zero_through(b0.trunc)


# -- the pulled-back square relation --------------------------------------------------

def test_square_relation_level4():
    f4 = level_exponential(4, 14)
    res = square_relation_residual(f4, 2 * alpha, (3 * beta - alpha**2) / 2)
    assert res.trunc >= 12
    assert res.is_zero_through(12)


def test_square_relation_trivial():
    res = square_relation_residual(X.truncate(8), 0, 0)
    # 4*(2)^2 - 4*(2)^2 = 0
    assert res.is_zero_through(6)


def test_square_relation_unique_solution():
    a1, b2 = sym("A1"), sym("B2")
    sol, factors = solve_square_relation(a1, b2, 12)
    assert factors == {k: 8 * (k + 1) * (3 * k - 8) for k in range(3, 12)}
    al = a1 / 2
    be = (al**2 + 2 * b2) / 3
    f4 = krichever_from_ode(
        al, be,
        4 * al * (4 * al**2 - 3 * be),
        4 * (32 * al**4 - 24 * al**2 * be + 3 * be**2),
        12,
    )
    assert (sol - f4).is_zero_through(12)


# -- serialization -------------------------------------------------------------------

def test_bivariate_json():
    F = fg_from_exp(X.truncate(8), 4)
    assert bivariate_to_json(F) == {
        "vars": ["u", "v"],
        "cap": 4,
        "coeffs": [{"du": 0, "dv": 1, "poly": "1"}, {"du": 1, "dv": 0, "poly": "1"}],
    }
