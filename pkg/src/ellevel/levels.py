"""Parameter relations pinning the level-2, level-3 and level-4 exponentials
inside the four-parameter family, and the invariants they induce.

Levels are identified by the integers 2, 3, 4; the string "kr" names the
generic four-parameter exponential with (alpha, beta, gamma, lambda) free.
"""

from __future__ import annotations

from .algebra import MultiPoly, sym
from .series import LaurentSeries, krichever_from_ode

_alpha, _beta, _gamma, _lam = sym("alpha"), sym("beta"), sym("gamma"), sym("lambda")
_delta, _eps = sym("delta"), sym("epsilon")

#: Free parameters of each level's exponential.
LEVEL_PARAMS = {
    "kr": ("alpha", "beta", "gamma", "lambda"),
    2: ("delta", "epsilon"),
    3: ("alpha", "gamma"),
    4: ("alpha", "beta"),
}


def level_bindings(level: int) -> dict[str, MultiPoly]:
    """Values of (alpha, beta, gamma, lambda) along the level's subfamily."""
    if level == 2:
        return {
            "alpha": MultiPoly.zero(),
            "beta": -2 * _delta / 3,
            "gamma": MultiPoly.zero(),
            "lambda": 16 * _delta**2 / 3 - 4 * _eps,
        }
    if level == 3:
        return {
            "beta": 3 * _alpha**2,
            "lambda": 12 * _alpha * (9 * _alpha**3 + _gamma),
        }
    if level == 4:
        return {
            "gamma": 4 * _alpha * (4 * _alpha**2 - 3 * _beta),
            "lambda": 4 * (32 * _alpha**4 - 24 * _alpha**2 * _beta + 3 * _beta**2),
        }
    raise ValueError(f"no such level: {level}")


def level_exponential(level, order: int) -> LaurentSeries:
    """The level's exponential series, built through the ODE recursion."""
    if level == "kr":
        return krichever_from_ode(_alpha, _beta, _gamma, _lam, order)
    params = {"alpha": _alpha, "beta": _beta, "gamma": _gamma, "lambda": _lam}
    params.update(level_bindings(level))
    return krichever_from_ode(
        params["alpha"], params["beta"], params["gamma"], params["lambda"], order)


def kr_invariants(beta=None, gamma=None, lam=None) -> tuple[MultiPoly, MultiPoly]:
    """(g2, g3) of the curve carrying the exponential: g2 = lambda,
    g3 = 4 beta^3 - lambda beta - gamma^2."""
    b = beta if beta is not None else _beta
    g = gamma if gamma is not None else _gamma
    l = lam if lam is not None else _lam
    return l, 4 * b**3 - l * b - g**2


def level_invariants(level: int) -> tuple[MultiPoly, MultiPoly]:
    """(g2, g3) in the level's own parameters."""
    bind = level_bindings(level)
    g2, g3 = kr_invariants()
    return g2.substitute(bind), g3.substitute(bind)


def level_discriminant_formula(level: int) -> MultiPoly:
    """The factored discriminant of each level's curve."""
    if level == 2:
        return 64 * _eps**2 * (_delta**2 - _eps)
    if level == 3:
        return -27 * (8 * _alpha**3 + _gamma) * _gamma**3
    if level == 4:
        return (256 * _alpha**2 * (5 * _alpha**2 - 3 * _beta)
                * (4 * _alpha**2 - 3 * _beta) ** 4)
    raise ValueError(f"no such level: {level}")


def kr_discriminant() -> MultiPoly:
    """Nondegeneracy discriminant of the four-parameter family."""
    g2, g3 = kr_invariants()
    return g2**3 - 27 * g3**2
