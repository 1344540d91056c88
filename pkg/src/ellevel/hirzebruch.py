"""Denominator-cleared residuals of the N-player special functional equation

    sum_i prod_{j != i} 1/f(x_j - x_i) = 0,

and the derivation of the parameter constraints it imposes on the
four-parameter exponential.

With H_i = prod_{j != i} f(x_j - x_i), the sum vanishes iff the cleared form
G = sum_i prod_{k != i} H_k does, because the series ring is an integral
domain and no H_i is zero.  Translation invariance fixes x_1 = 0, leaving
N - 1 formal variables.

G has intrinsic valuation (N-1)^2, and its valuation component vanishes for
every f = x + O(x^2) (the classical partial-fraction identity for f = x), so
the `cap` argument counts orders *above* the valuation: a residual computed
"to cap D" is exact through total degree (N-1)^2 + D.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import MultiPoly, sym
from .levels import level_bindings, level_exponential
from .multiseries import MultiSeries
from .series import LaurentSeries, krichever_from_ode


class NonlinearConstraintError(ValueError):
    """A residual coefficient was not linear in any remaining unknown."""


#: Unknowns eliminated by the sequential solver, per player count.
_UNKNOWNS = {2: ("alpha", "gamma"), 3: ("beta", "lambda"), 4: ("gamma", "lambda")}


def abs_cap(players: int, cap: int) -> int:
    return (players - 1) ** 2 + cap


def needed_order(players: int, cap: int) -> int:
    """Truncation order of f required to clear the residual to `cap`."""
    a = abs_cap(players, cap)
    return {2: a, 3: a - 3, 4: a - 8}[players]


def cleared_residual(f: LaurentSeries, players: int, cap: int) -> MultiSeries:
    """G = sum_i prod_{k != i} H_k, exact through degree (players-1)^2 + cap."""
    if players not in (2, 3, 4):
        raise ValueError("players must be 2, 3 or 4")
    if f.trunc is not None and f.trunc < needed_order(players, cap):
        raise ValueError(
            f"f truncated at {f.trunc}; need order {needed_order(players, cap)}")
    a = abs_cap(players, cap)
    m = players - 1

    def arg(j: int, i: int) -> list[int]:
        # position vector of x_j - x_i with x_1 = 0 and x_t = y_(t-2)
        d = [0] * m
        if j > 1:
            d[j - 2] += 1
        if i > 1:
            d[i - 2] -= 1
        return d

    def fl(j: int, i: int, order: int) -> MultiSeries:
        return MultiSeries.from_univariate(f, arg(j, i), m, order)

    if players == 2:
        return fl(2, 1, a) + fl(1, 2, a)

    if players == 3:
        h = [None] * 4
        for i in (1, 2, 3):
            ja, jb = [j for j in (1, 2, 3) if j != i]
            h[i] = fl(ja, i, a - 3).mul(fl(jb, i, a - 3), cap=a - 2)
        return h[3].mul(h[1] + h[2], cap=a) + h[1].mul(h[2], cap=a)

    h = [None] * 5
    for i in (1, 2, 3, 4):
        js = [j for j in (1, 2, 3, 4) if j != i]
        prod = fl(js[0], i, a - 8).mul(fl(js[1], i, a - 8), cap=a - 7)
        h[i] = prod.mul(fl(js[2], i, a - 8), cap=a - 6)
    t1 = h[1].mul(h[2], cap=a - 3)
    t2 = h[3].mul(h[4], cap=a - 3)
    return (h[1] + h[2]).mul(t2, cap=a) + t1.mul(h[3] + h[4], cap=a)


@dataclass
class ConstraintReport:
    """Outcome of the sequential constraint solve."""
    players: int
    cap: int
    solved: list = field(default_factory=list)       # ordered (symbol, value)
    redundant_zero: int = 0                          # vanishing coefficients
    parameterization: list = field(default_factory=list)

    @property
    def bindings(self) -> dict[str, MultiPoly]:
        return dict(self.solved)


def derive_constraints(players: int, cap: int, *,
                       _walk_reversed: bool = False) -> ConstraintReport:
    """Solve the residual of the fully symbolic exponential for the level
    relations.

    Coefficients are walked in canonical order (ascending total degree, then
    exponent order).  Each nonzero coefficient, after forward substitution of
    the bindings found so far, must be linear in a not-yet-determined symbol
    from the player count's unknown set, with a leading coefficient that is a
    nonzero rational -- or, for four players, a rational times a power of
    alpha, which is legitimate on the alpha != 0 branch where the level-4
    family lives (the alpha = 0 solutions are the level-2 family, on which
    the solved relations also hold).  Anything else raises
    NonlinearConstraintError rather than guessing.

    The `_walk_reversed` flag only reverses the enumeration order inside each
    degree; the solved bindings are canonical and must not depend on it.
    """
    f = krichever_from_ode(
        sym("alpha"), sym("beta"), sym("gamma"), sym("lambda"),
        max(5, needed_order(players, cap)))
    g = cleared_residual(f, players, cap)
    report = ConstraintReport(players, cap)
    bindings: dict[str, MultiPoly] = {}
    unknowns = _UNKNOWNS[players]

    terms = list(g.terms())
    if _walk_reversed:
        terms = [t for d in sorted({t[0] for t in terms})
                 for t in reversed([u for u in terms if u[0] == d])]
    for d, exps, p in terms:
        q = p.substitute(bindings) if bindings else p
        if q.is_zero:
            report.redundant_zero += 1
            continue
        solved = _solve_linear(q, unknowns, bindings, players == 4)
        if solved is None:
            raise NonlinearConstraintError(
                f"nonlinear constraint; raise cap or report "
                f"(degree {d}, monomial {exps}: {q.text()})")
        report.solved.append((solved, bindings[solved]))
    if players == 2:
        report.parameterization = sorted(
            (s, v) for s, v in level_bindings(2).items() if s not in bindings)
    return report


def _solve_linear(q: MultiPoly, unknowns, bindings: dict,
                  allow_alpha: bool) -> str | None:
    for s in unknowns:
        if s in bindings or q.degree_in(s) != 1:
            continue
        lead = q.coefficient_in(s, 1).as_monomial()
        if lead is None:
            continue
        coeff, mono = lead
        if mono and not (allow_alpha and set(mono) == {"alpha"}):
            continue
        try:
            value = (-q.coefficient_in(s, 0)).divide_exact(coeff, mono)
        except ValueError:
            continue
        bindings[s] = value
        return s
    return None


@dataclass
class LevelReport:
    """Residual status of one level's exponential under one equation."""
    level: int
    players: int
    cap: int
    status: str                      # "zero" | "nonzero"
    first_nonzero: tuple | None      # (degree, exponents, MultiPoly)


def verify_level(level: int, players: int, cap: int) -> LevelReport:
    """Substitute the level's relations into the exponential and clear."""
    f = level_exponential(level, max(5, needed_order(players, cap)))
    g = cleared_residual(f, players, cap)
    a = abs_cap(players, cap)
    if g.is_zero_through(a):
        return LevelReport(level, players, cap, "zero", None)
    return LevelReport(level, players, cap, "nonzero", g.first_nonzero())


def constraint_report_to_json(r: ConstraintReport) -> dict:
    return {
        "players": r.players,
        "cap": r.cap,
        "constraints": [{"symbol": s, "value": v.text()} for s, v in r.solved],
        "redundant_zero": r.redundant_zero,
        "parameterization": [
            {"symbol": s, "value": v.text()} for s, v in r.parameterization],
    }


def level_report_to_json(r: LevelReport) -> dict:
    out = {
        "level": r.level,
        "players": r.players,
        "cap": r.cap,
        "status": r.status,
    }
    if r.first_nonzero is not None:
        d, exps, p = r.first_nonzero
        out["first_nonzero"] = {"monomial": list(exps), "poly": p.text()}
    return out
