"""Truncated multivariate power series with polynomial coefficients.

A series holds homogeneous components indexed by total degree, each a sparse
map from packed exponent vectors to MultiPoly coefficients.  `cap` is the
truncation order: components above it are unknown.  The same truncation
discipline as the univariate module applies, with products propagating
min(cap_f + val(g), cap_g + val(f)).
"""

from __future__ import annotations

from typing import Sequence

from .algebra import MultiPoly, Rat, _coerce
from .series import LaurentSeries

_VSHIFT = 8
_VMASK = (1 << _VSHIFT) - 1

_ZERO = MultiPoly.zero()


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for e in exps:
        key = (key << _VSHIFT) | e
    return key


def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    out = []
    for _ in range(nvars):
        out.append(key & _VMASK)
        key >>= _VSHIFT
    return tuple(reversed(out))


class MultiSeries:
    """Power series in `nvars` formal variables, truncated by total degree."""

    __slots__ = ("nvars", "cap", "comps")

    def __init__(self, nvars: int, cap: int,
                 comps: dict[int, dict[int, MultiPoly]] | None = None):
        self.nvars = nvars
        self.cap = cap
        self.comps = comps if comps is not None else {}

    @staticmethod
    def zero(nvars: int, cap: int) -> "MultiSeries":
        return MultiSeries(nvars, cap)

    @staticmethod
    def variable(i: int, nvars: int, cap: int) -> "MultiSeries":
        exps = [0] * nvars
        exps[i] = 1
        return MultiSeries(nvars, cap, {1: {_pack(exps): MultiPoly.const(1)}})

    @staticmethod
    def from_univariate(f: LaurentSeries, direction: Sequence[int],
                        nvars: int, cap: int) -> "MultiSeries":
        """f evaluated at the linear form sum(direction[i] * y_i).

        Used to place a one-variable exponential on a difference of formal
        variables; `direction` entries are small integers.
        """
        if f.pole_order:
            raise ValueError("only power series can be composed with a linear form")
        lin = {}
        for i, c in enumerate(direction):
            if c:
                exps = [0] * nvars
                exps[i] = 1
                lin[_pack(exps)] = Rat(c)
        comps: dict[int, dict[int, MultiPoly]] = {}
        power: dict[int, Rat] = {0: Rat(1)}  # lin^0
        top = cap if f.trunc is None else min(cap, f.trunc)
        f0 = f.coeffs.get(0)
        if f0:
            comps[0] = {0: f0}
        for e in range(1, top + 1):
            nxt: dict[int, Rat] = {}
            for k1, c1 in power.items():
                for k2, c2 in lin.items():
                    k = k1 + k2
                    nxt[k] = nxt.get(k, Rat(0)) + c1 * c2
            power = nxt
            fe = f.coeffs.get(e)
            if fe:
                comps[e] = {k: fe * c for k, c in power.items() if c}
        ms = MultiSeries(nvars, top if f.trunc is not None else cap, comps)
        return ms

    # -- structure -------------------------------------------------------------

    def valuation(self) -> int | None:
        degs = [d for d, c in self.comps.items() if c]
        return min(degs) if degs else None

    def _val_bound(self) -> int:
        v = self.valuation()
        return v if v is not None else self.cap + 1

    def coefficient(self, exps: Sequence[int]) -> MultiPoly:
        d = sum(exps)
        if d > self.cap:
            raise ValueError(f"degree {d} beyond truncation order {self.cap}")
        return self.comps.get(d, {}).get(_pack(exps), _ZERO)

    def is_zero_through(self, order: int) -> bool:
        if order > self.cap:
            raise ValueError(f"series only valid to order {self.cap}")
        return all(d > order or not c for d, c in self.comps.items())

    def first_nonzero(self):
        """(degree, exponents, coefficient) of the first term in canonical
        order (ascending degree, then ascending exponent vector), or None."""
        for d in sorted(self.comps):
            comp = self.comps[d]
            if comp:
                k = min(comp)
                return d, _unpack(k, self.nvars), comp[k]
        return None

    def terms(self):
        for d in sorted(self.comps):
            for k in sorted(self.comps[d]):
                yield d, _unpack(k, self.nvars), self.comps[d][k]

    # -- arithmetic ---------------------------------------------------------------

    def __neg__(self) -> "MultiSeries":
        return MultiSeries(self.nvars, self.cap, {
            d: {k: -p for k, p in comp.items()} for d, comp in self.comps.items()})

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        cap = min(self.cap, other.cap)
        out: dict[int, dict[int, MultiPoly]] = {}
        for src in (self.comps, other.comps):
            for d, comp in src.items():
                if d > cap:
                    continue
                dst = out.setdefault(d, {})
                for k, p in comp.items():
                    s = dst.get(k, _ZERO) + p
                    if s:
                        dst[k] = s
                    else:
                        dst.pop(k, None)
        return MultiSeries(self.nvars, cap, {d: c for d, c in out.items() if c})

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def scale(self, p) -> "MultiSeries":
        q = _coerce(p)
        out = {}
        for d, comp in self.comps.items():
            nc = {}
            for k, v in comp.items():
                s = v * q
                if s:
                    nc[k] = s
            if nc:
                out[d] = nc
        return MultiSeries(self.nvars, self.cap, out)

    def mul(self, other: "MultiSeries", cap: int | None = None) -> "MultiSeries":
        rcap = min(self.cap + other._val_bound(), other.cap + self._val_bound())
        if cap is not None:
            rcap = min(rcap, cap)
        out: dict[int, dict[int, MultiPoly]] = {}
        for d1, c1 in self.comps.items():
            for d2, c2 in other.comps.items():
                d = d1 + d2
                if d > rcap:
                    continue
                dst = out.setdefault(d, {})
                for k1, p1 in c1.items():
                    for k2, p2 in c2.items():
                        k = k1 + k2
                        s = p1 * p2
                        if s:
                            cur = dst.get(k)
                            if cur is None:
                                dst[k] = s
                            else:
                                cur = cur + s
                                if cur:
                                    dst[k] = cur
                                else:
                                    del dst[k]
        return MultiSeries(self.nvars, rcap, {d: c for d, c in out.items() if c})

    # -- reindexing and restriction --------------------------------------------------

    def permute(self, perm: Sequence[int]) -> "MultiSeries":
        """Relabel variables: new variable i is old variable perm[i]."""
        out = {}
        for d, comp in self.comps.items():
            nc = {}
            for k, p in comp.items():
                exps = _unpack(k, self.nvars)
                nc[_pack([exps[perm[i]] for i in range(self.nvars)])] = p
            out[d] = nc
        return MultiSeries(self.nvars, self.cap, out)

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiSeries":
        """View in a larger variable set; old variable i becomes positions[i]."""
        out = {}
        for d, comp in self.comps.items():
            nc = {}
            for k, p in comp.items():
                exps = _unpack(k, self.nvars)
                new = [0] * nvars
                for i, e in enumerate(exps):
                    new[positions[i]] = e
                nc[_pack(new)] = p
            out[d] = nc
        return MultiSeries(nvars, self.cap, out)

    def restrict_line(self, direction: Sequence[Rat]) -> LaurentSeries:
        """Substitute y_i = direction[i] * t; univariate series in t."""
        out: dict[int, MultiPoly] = {}
        for d, comp in self.comps.items():
            acc = _ZERO
            for k, p in comp.items():
                scale = Rat(1)
                for i, e in enumerate(_unpack(k, self.nvars)):
                    if e:
                        scale = scale * direction[i] ** e
                if scale:
                    acc = acc + p * scale
            if acc:
                out[d] = acc
        return LaurentSeries(out, self.cap)

    def substitute_params(self, bindings) -> "MultiSeries":
        out = {}
        for d, comp in self.comps.items():
            nc = {}
            for k, p in comp.items():
                q = p.substitute(bindings)
                if q:
                    nc[k] = q
            if nc:
                out[d] = nc
        return MultiSeries(self.nvars, self.cap, out)


def compose_pair(F: MultiSeries, X: MultiSeries, Y: MultiSeries,
                 cap: int | None = None) -> MultiSeries:
    """F(X, Y) for a two-variable F and series X, Y of valuation >= 1."""
    if F.nvars != 2:
        raise ValueError("compose_pair requires a two-variable series")
    for s in (X, Y):
        v = s.valuation()
        if v is not None and v < 1:
            raise ValueError("substituted series must have valuation >= 1")
    rcap = min(F.cap, X.cap, Y.cap)
    if cap is not None:
        rcap = min(rcap, cap)
    nvars = X.nvars
    c = {}
    for d, comp in F.comps.items():
        for k, p in comp.items():
            i, j = _unpack(k, 2)
            c[(i, j)] = p
    top = max((i + j for i, j in c), default=0)
    xpow = [MultiSeries(nvars, rcap, {0: {0: MultiPoly.const(1)}})]
    ypow = [MultiSeries(nvars, rcap, {0: {0: MultiPoly.const(1)}})]
    for _ in range(top):
        xpow.append(xpow[-1].mul(X, cap=rcap))
        ypow.append(ypow[-1].mul(Y, cap=rcap))
    acc = MultiSeries.zero(nvars, rcap)
    for (i, j), p in sorted(c.items()):
        acc = acc + xpow[i].mul(ypow[j], cap=rcap).scale(p)
    return acc
