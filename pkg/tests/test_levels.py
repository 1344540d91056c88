import pytest

from ellevel.algebra import MultiPoly, sym
from ellevel.levels import (
    kr_discriminant, level_bindings, level_discriminant_formula,
    level_exponential, level_invariants,
)
from ellevel.series import jacobi_residual, krichever_constants, ode_residual

alpha, beta, gamma, lam = sym("alpha"), sym("beta"), sym("gamma"), sym("lambda")
delta, eps = sym("delta"), sym("epsilon")


def test_level2_series_is_elliptic_sine():
    f = level_exponential(2, 12)
    assert jacobi_residual(f, delta, eps).is_zero_through(11)
    # odd: no even-degree coefficients
    assert all(d % 2 == 1 for d in f.coeffs)


def test_level3_series_prefix():
    f = level_exponential(3, 8)
    assert f.coefficient(2) == alpha
    assert f.coefficient(3) == 2 * alpha**2
    assert f.coefficient(4) == (10 * alpha**3 - gamma) / 6
    assert f.coefficient(5) == alpha * (22 * alpha**3 - 7 * gamma) / 15


def test_level4_series_prefix():
    f = level_exponential(4, 8)
    assert f.coefficient(2) == alpha
    assert f.coefficient(3) == (alpha**2 + beta) / 2
    assert f.coefficient(4) == -5 * alpha * (alpha**2 - beta) / 2
    assert f.coefficient(5) == -(233 * alpha**4 - 186 * alpha**2 * beta
                                 - 3 * beta**2) / 40


def test_levels_not_odd_above_two():
    assert level_exponential(3, 6).coefficient(2) == alpha
    assert level_exponential(4, 6).coefficient(2) == alpha


def test_level4_ode_constants():
    # under the level-4 relations the ODE constants become
    # C1 = -6 alpha, C2 = 6 (alpha^2 - beta), C3 = 6 alpha (5 alpha^2 - 3 beta)
    bind = level_bindings(4)
    c = krichever_constants(alpha, beta, gamma.substitute(bind))
    assert c.c1 == -6 * alpha
    assert c.c2 == 6 * (alpha**2 - beta)
    assert c.c3 == 6 * alpha * (5 * alpha**2 - 3 * beta)
    f = level_exponential(4, 12)
    assert ode_residual(f, c).is_zero_through(9)


def test_level3_ode_constants():
    bind = level_bindings(3)
    c = krichever_constants(alpha, beta.substitute(bind), gamma)
    assert c.c2 == -12 * alpha**2
    assert c.c3 == 2 * gamma + 16 * alpha**3
    f = level_exponential(3, 12)
    assert ode_residual(f, c).is_zero_through(9)


def test_level2_ode_is_sine_equation():
    # with alpha = gamma = 0 the ODE reads f f''' - 3 f' f'' = 4 delta f f'
    bind = level_bindings(2)
    c = krichever_constants(0, beta.substitute(bind), 0)
    assert c.c1.is_zero
    assert c.c2 == 4 * delta
    assert c.c3.is_zero


def test_level3_invariants():
    a, b = level_invariants(3)
    assert a == 12 * alpha * (9 * alpha**3 + gamma)
    assert b == -216 * alpha**6 - 36 * alpha**3 * gamma - gamma**2


def test_level4_invariants():
    a, b = level_invariants(4)
    assert a == 4 * (32 * alpha**4 - 24 * alpha**2 * beta + 3 * beta**2)
    assert b == -8 * (2 * alpha**2 - beta) * (16 * alpha**4
                                              - 8 * alpha**2 * beta - beta**2)


def test_kr_discriminant_degeneracy():
    d = kr_discriminant()
    assert d == lam**3 - 27 * (4 * beta**3 - lam * beta - gamma**2) ** 2
    # level-2 specialization reproduces the level-2 discriminant
    assert d.substitute(level_bindings(2)) == level_discriminant_formula(2)


@pytest.mark.parametrize("level", [3, 4])
def test_kr_discriminant_specializes(level):
    d = kr_discriminant().substitute(level_bindings(level))
    assert d == level_discriminant_formula(level)


def test_unknown_level_rejected():
    with pytest.raises(ValueError):
        level_bindings(5)
    with pytest.raises(ValueError):
        level_discriminant_formula(1)
