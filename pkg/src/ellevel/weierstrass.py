"""Series for the Weierstrass functions p, zeta, sigma with formal invariants,
the Baker-Akhiezer function, and the sigma-quotient construction of the
four-parameter exponential.

Everything is formal in (g2, g3): no periods or lattices are represented, so
degenerate invariants are covered uniformly.  The value of zeta at the pole
parameter is the symbol `w`; the values of p and p' there are `beta` and
`gamma`.  Identities involving gamma hold modulo the curve relation
gamma^2 = 4 beta^3 - g2 beta - g3, so every zero test first rewrites even
powers of gamma through that relation (raw forms are never compared).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .algebra import MultiPoly, Rat, sym
from .series import LaurentSeries, series_exp

_w, _beta, _gamma = sym("w"), sym("beta"), sym("gamma")
_lam = sym("lambda")
_ONE = MultiPoly.const(1)


def wp_series(g2, g3, order: int) -> LaurentSeries:
    """Laurent solution of (p')^2 = 4p^3 - g2 p - g3 with principal part x^-2.

    Only even degrees occur; the coefficient of x^(2k-2) follows the standard
    quadratic recursion seeded by g2/20 and g3/28.
    """
    if order < 4:
        raise ValueError("order must be at least 4")
    g2, g3 = MultiPoly.const(g2) if isinstance(g2, (int, str)) else g2, \
        MultiPoly.const(g3) if isinstance(g3, (int, str)) else g3
    c: dict[int, MultiPoly] = {2: g2 / 20, 3: g3 / 28}
    kmax = (order + 2) // 2
    for k in range(4, kmax + 1):
        acc = MultiPoly.zero()
        for m in range(2, k - 1):
            acc = acc + c[m] * c[k - m]
        c[k] = acc * Rat(3) / ((2 * k + 1) * (k - 3))
    coeffs = {-2: _ONE}
    for k, p in c.items():
        if p and 2 * k - 2 <= order:
            coeffs[2 * k - 2] = p
    return LaurentSeries(coeffs, order)


def discriminant(g2: MultiPoly, g3: MultiPoly) -> MultiPoly:
    """g2^3 - 27 g3^2."""
    return g2**3 - 27 * g3**2


@dataclass(frozen=True)
class WeierstrassContext:
    """Cached series of p, p', zeta, sigma for fixed formal invariants."""

    g2: MultiPoly
    g3: MultiPoly
    order: int

    @cached_property
    def wp(self) -> LaurentSeries:
        return wp_series(self.g2, self.g3, self.order)

    @cached_property
    def wp_prime(self) -> LaurentSeries:
        return self.wp.derivative()

    @cached_property
    def zeta(self) -> LaurentSeries:
        # zeta' = -p and zeta = 1/x + O(x)
        tail = self.wp - LaurentSeries.from_terms({-2: 1})
        return LaurentSeries.from_terms({-1: 1}) - tail.integrate()

    @cached_property
    def sigma(self) -> LaurentSeries:
        # (log sigma)' = zeta and sigma = x + O(x^2)
        tail = self.zeta - LaurentSeries.from_terms({-1: 1})
        return series_exp(tail.integrate()).shift(1)


# Differentiation at the pole parameter z: sigma'/sigma = zeta there, and the
# closed rules below keep the coefficient ring at {w, beta, gamma, g2, g3}.
def _sigma_quotient_rules(g2: MultiPoly) -> dict[str, MultiPoly]:
    return {
        "w": -_beta,
        "beta": _gamma,
        "gamma": 6 * _beta**2 - g2 / 2,
    }


@dataclass(frozen=True)
class BakerAkhiezerContext:
    """The function sigma(z-x)/(sigma(x)sigma(z)) * exp(zeta(z) x) as a series
    in x, with the z-dependence carried by the symbols w, beta, gamma."""

    base: WeierstrassContext
    phi: LaurentSeries

    def reduce(self, p: MultiPoly) -> MultiPoly:
        """Rewrite gamma^2 -> 4 beta^3 - g2 beta - g3 (the curve relation)."""
        rel = 4 * _beta**3 - self.base.g2 * _beta - self.base.g3
        return p.substitute_square("gamma", rel)

    def reduces_to_zero(self, f: LaurentSeries, order: int) -> bool:
        if f.trunc is not None and f.trunc < order:
            raise ValueError(f"series only valid to order {f.trunc}")
        return all(not self.reduce(p) for d, p in f.coeffs.items() if d <= order)


def phi_series(ctx: WeierstrassContext, order: int | None = None) -> BakerAkhiezerContext:
    """Expand the Baker-Akhiezer function to the given order (pole order 1).

    sigma(z-x)/sigma(z) is expanded by iterated differentiation at z: its
    x^k coefficient is (-1)^k/k! times h_k, where h_0 = 1 and
    h_{k+1} = d(h_k) + w h_k with d the closed rules above.  The result is
    multiplied by exp(w x) and the Laurent inverse of sigma(x).
    """
    n = (order if order is not None else ctx.order) + 2
    rules = _sigma_quotient_rules(ctx.g2)
    h = _ONE
    quotient: dict[int, MultiPoly] = {0: _ONE}
    fact = Rat(1)
    for k in range(1, n + 1):
        h = h.derivation(rules) + _w * h
        fact = fact * k
        if h:
            quotient[k] = h * (Rat(-1) ** k / fact)
    s = LaurentSeries(quotient, n)
    e = series_exp(LaurentSeries.from_terms({1: _w}), order=n)
    phi = s.mul(e).mul(ctx.sigma.invert())
    return BakerAkhiezerContext(ctx, phi)


def lame_residual(ba: BakerAkhiezerContext) -> LaurentSeries:
    """Phi'' - 2 p Phi - beta Phi; zero modulo the curve relation."""
    phi = ba.phi
    return phi.derivative().derivative() - ba.base.wp.mul(phi) * 2 - phi * _beta


def log_derivative_residual(ba: BakerAkhiezerContext) -> LaurentSeries:
    """2 (p - beta) Phi' - (p' + gamma) Phi."""
    phi = ba.phi
    lhs = (ba.base.wp - _beta).mul(phi.derivative()) * 2
    rhs = (ba.base.wp_prime + _gamma).mul(phi)
    return lhs - rhs


def third_order_residual(ba: BakerAkhiezerContext) -> LaurentSeries:
    """Phi Phi''' - 3 Phi' Phi'' + 6 beta Phi Phi' + 2 gamma Phi^2."""
    phi = ba.phi
    d1 = phi.derivative()
    d2 = d1.derivative()
    d3 = d2.derivative()
    return (phi.mul(d3) - 3 * d1.mul(d2)
            + phi.mul(d1) * (6 * _beta) + phi.mul(phi) * (2 * _gamma))


def krichever_from_phi(ba: BakerAkhiezerContext, alpha) -> LaurentSeries:
    """exp(alpha x)/Phi, with g3 eliminated through the curve relation and
    g2 renamed to lambda; coefficients then lie in Q[alpha beta gamma lambda]."""
    a = MultiPoly.const(alpha) if isinstance(alpha, (int, str)) else alpha
    inv = ba.phi.invert()
    e = series_exp(LaurentSeries.from_terms({1: a}), order=inv.trunc)
    f = e.mul(inv)
    bind = {"g3": 4 * _beta**3 - _lam * _beta - _gamma**2, "g2": _lam}
    return f.substitute(bind)
