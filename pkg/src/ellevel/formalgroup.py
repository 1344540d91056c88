"""Formal group laws from exponentials, their A/B normal form, and the
series identities characterizing the level-2, level-3 and level-4 laws.

The group law of an exponential f is F(u, v) = f(g(u) + g(v)) with g the
compositional inverse of f.  Every law handled here has the shape

    F(u, v) = (u^2 A(v) - v^2 A(u)) / (u B(v) - v B(u)),

with A(0) = B(0) = 1, normalized by A_2 = B_1 = 0.  The level conditions are
A = 1 (level 2), B = A^2 - 2 A_1 u (level 3) and

    (2 B(u) + 3 A_1 u)^2 = 4 A(u)^3 - (3 A_1^2 - 8 B_2) u^2 A(u)^2

(level 4); the latter pulls back along u = f(x) to a differential relation
whose coefficientwise solution is unique, which the solver below replays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import MultiPoly, _coerce
from .multiseries import MultiSeries, compose_pair
from .series import LaurentSeries, series_compose, series_reversion

_ONE = MultiPoly.const(1)


def fg_from_exp(f: LaurentSeries, cap: int) -> MultiSeries:
    """The group law F(u,v) = f(g(u) + g(v)) to total degree `cap`."""
    if f.valuation() != 1 or f.coefficient(1) != _ONE:
        raise ValueError("exponential must be x + O(x^2)")
    g = series_reversion(f)
    t = (MultiSeries.from_univariate(g, [1, 0], 2, cap)
         + MultiSeries.from_univariate(g, [0, 1], 2, cap))
    # Horner in t over the coefficients of f
    top = min(cap, f.trunc if f.trunc is not None else cap)
    acc = MultiSeries.zero(2, cap)
    for d in range(top, 0, -1):
        acc = acc.mul(t, cap=cap)
        fd = f.coeffs.get(d)
        if fd:
            acc = acc + MultiSeries(2, cap, {0: {0: fd}})
    return acc.mul(t, cap=cap)


@dataclass
class AxiomReport:
    """Outcome of the formal-group axiom checks."""
    cap: int
    assoc_cap: int
    unit_ok: bool
    commutative_ok: bool
    associative_ok: bool
    failures: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.unit_ok and self.commutative_ok and self.associative_ok


def fg_axiom_check(F: MultiSeries) -> AxiomReport:
    """Check F(u,0) = u, commutativity (both to the cap) and associativity
    (to cap - 2, which bounds the trivariate expansion cost)."""
    cap = F.cap
    failures = []
    unit_ok = F.coefficient([1, 0]) == _ONE
    if not unit_ok:
        failures.append(("unit", (1, 0)))
    for d, (i, j), p in F.terms():
        if j == 0 and i != 1:
            unit_ok = False
            failures.append(("unit", (i, j)))
    comm_ok = True
    for d, (i, j), p in F.terms():
        if F.comps.get(d, {}).get(_pack2(j, i)) != p:
            comm_ok = False
            failures.append(("commutativity", (i, j)))
    acap = cap - 2
    u = MultiSeries.variable(0, 3, acap)
    v = MultiSeries.variable(1, 3, acap)
    w = MultiSeries.variable(2, 3, acap)
    inner_uv = compose_pair(F, u, v, cap=acap)
    inner_vw = compose_pair(F, v, w, cap=acap)
    lhs = compose_pair(F, inner_uv, w, cap=acap)
    rhs = compose_pair(F, u, inner_vw, cap=acap)
    diff = lhs - rhs
    assoc_ok = diff.is_zero_through(acap)
    if not assoc_ok:
        failures.append(("associativity", diff.first_nonzero()[1]))
    return AxiomReport(cap, acap, unit_ok, comm_ok, assoc_ok, failures)


def _pack2(i: int, j: int) -> int:
    return (i << 8) | j


@dataclass(frozen=True)
class ABPair:
    """The two structure series of a law in A/B form, with A(0) = B(0) = 1
    and the normalization A_2 = B_1 = 0."""
    A: LaurentSeries
    B: LaurentSeries
    A1: MultiPoly
    B2: MultiPoly


def extract_AB(f: LaurentSeries) -> ABPair:
    """Recover (A, B) from an exponential by composing with its logarithm:

        B(f(x)) = f'(x) - A1 f(x)
        2 A(f(x)) = 2 f'(x)^2 - f(x) f''(x) - A1 f(x) f'(x) - 2 B2 f(x)^2

    where A1 = 2 f_1 and B2 = 3 f_2 - 2 f_1^2 enforce the normalization
    (equivalently g''(0) = -A1 and g'''(0) = 2 A1^2 - 2 B2 for the logarithm).
    """
    if f.valuation() != 1 or f.coefficient(1) != _ONE:
        raise ValueError("exponential must be x + O(x^2)")
    f1 = f.coefficient(2)
    f2 = f.coefficient(3)
    a1 = 2 * f1
    b2 = 3 * f2 - 2 * f1**2
    g = series_reversion(f)
    d1 = f.derivative()
    d2 = d1.derivative()
    b_of_f = d1 - f * a1
    a_of_f = (2 * d1.mul(d1) - f.mul(d2) - f.mul(d1) * a1 - f.mul(f) * (2 * b2)) / 2
    B = series_compose(b_of_f, g).rename("u")
    A = series_compose(a_of_f, g).rename("u")
    return ABPair(A, B, a1, b2)


def buchstaber_residual(F: MultiSeries, ab: ABPair) -> MultiSeries:
    """F (u B(v) - v B(u)) - (u^2 A(v) - v^2 A(u)): zero iff F has the
    rational A/B form with this pair."""
    cap = F.cap
    u_bv = MultiSeries.from_univariate(ab.B, [0, 1], 2, cap - 1).mul(
        MultiSeries.variable(0, 2, cap))
    v_bu = MultiSeries.from_univariate(ab.B, [1, 0], 2, cap - 1).mul(
        MultiSeries.variable(1, 2, cap))
    u2_av = MultiSeries.from_univariate(ab.A, [0, 1], 2, cap - 2).mul(
        MultiSeries.variable(0, 2, cap)).mul(MultiSeries.variable(0, 2, cap))
    v2_au = MultiSeries.from_univariate(ab.A, [1, 0], 2, cap - 2).mul(
        MultiSeries.variable(1, 2, cap)).mul(MultiSeries.variable(1, 2, cap))
    return F.mul(u_bv - v_bu) - (u2_av - v2_au)


def level_form_residual(level: int, ab: ABPair) -> LaurentSeries:
    """Residual of the level's characterizing condition on (A, B).

    level 2: A - 1
    level 3: B - A^2 + 2 A1 u
    level 4: (2B + 3 A1 u)^2 - 4 A^3 + (3 A1^2 - 8 B2) u^2 A^2
    """
    u = LaurentSeries.x("u")
    if level == 2:
        return ab.A - 1
    if level == 3:
        return ab.B - ab.A.mul(ab.A) + u * (2 * ab.A1)
    if level == 4:
        s = ab.B * 2 + u * (3 * ab.A1)
        a2 = ab.A.mul(ab.A)
        return (s.mul(s) - 4 * a2.mul(ab.A)
                + u.mul(u).mul(a2) * (3 * ab.A1**2 - 8 * ab.B2))
    raise ValueError(f"no such level: {level}")


def square_relation_residual(f: LaurentSeries, a1, b2) -> LaurentSeries:
    """LHS - RHS of the pulled-back level-4 square relation:

        4 (2f' + A1 f)^2 = (4f'^2 - 2ff'' - 2A1 ff' - (3A1^2 - 4B2) f^2)
                           * (2f'^2 - ff'' - A1 ff' - 2B2 f^2)^2.
    """
    a1, b2 = _coerce(a1), _coerce(b2)
    d1 = f.derivative()
    d2 = d1.derivative()
    ff = f.mul(f)
    fd1 = f.mul(d1)
    d1d1 = d1.mul(d1)
    fd2 = f.mul(d2)
    lhs_root = d1 * 2 + f * a1
    lhs = lhs_root.mul(lhs_root) * 4
    b1 = d1d1 * 4 - fd2 * 2 - fd1 * (2 * a1) - ff * (3 * a1**2 - 4 * b2)
    br = d1d1 * 2 - fd2 - fd1 * a1 - ff * (2 * b2)
    return lhs - b1.mul(br.mul(br))


def solve_square_relation(a1, b2, order: int) -> tuple[LaurentSeries, dict[int, object]]:
    """Solve the square relation coefficientwise for f = x + O(x^2).

    The x^1 and x^2 residual coefficients force f_1 = A1/2 and
    f_2 = (2 f_1^2 + B2)/3; at x^k for k >= 3 the residual is affine in f_k
    with the constant factor 8 (k+1)(3k - 8), which never vanishes.  Returns
    the solution and the map k -> observed linear factor.
    """
    a1, b2 = _coerce(a1), _coerce(b2)
    coeffs = {1: _ONE, 2: a1 / 2}
    coeffs[3] = (2 * (a1 / 2) ** 2 + b2) / 3
    coeffs = {d: p for d, p in coeffs.items() if p}
    factors: dict[int, object] = {}
    for k in range(3, order):
        base = LaurentSeries(dict(coeffs), k + 1)
        r0 = square_relation_residual(base, a1, b2).coefficient(k)
        probe = dict(coeffs)
        probe[k + 1] = _ONE
        r1 = square_relation_residual(LaurentSeries(probe, k + 1), a1, b2).coefficient(k)
        lin = (r1 - r0).as_rational()
        if lin is None or not lin:
            raise ValueError(f"residual not affine-linear with rational factor at x^{k}")
        factors[k] = lin
        fk = -r0 / lin
        if fk:
            coeffs[k + 1] = fk
    return LaurentSeries(coeffs, order), factors


def bivariate_to_json(F: MultiSeries) -> dict:
    return {
        "vars": ["u", "v"],
        "cap": F.cap,
        "coeffs": [
            {"du": i, "dv": j, "poly": p.text()} for _, (i, j), p in F.terms()
        ],
    }
