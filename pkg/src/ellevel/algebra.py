"""Exact sparse multivariate polynomials over the rationals.

This is the coefficient ring used everywhere else in the package.  A
polynomial is a dict mapping packed exponent keys to exact rational
coefficients; zero coefficients are never stored, so two polynomials are
equal iff their dicts are equal.

The symbol universe is closed: every parameter that occurs in any series
or identity handled by this package has a fixed name in ``SYMBOLS``.  A
monomial's exponent vector is packed into a single integer with the total
degree in the topmost field, so that

  * multiplying monomials is one integer addition, and
  * sorting keys descending is exactly graded-lex descending order.

Scalars are ``gmpy2.mpq`` when available (much faster), otherwise
``fractions.Fraction``; both are kept in canonical form (reduced, positive
denominator) by the library itself.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Union

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

#: Closed symbol universe, in the fixed (lexicographic) canonical order.
SYMBOLS = (
    "A1", "B2", "a", "a1", "a2", "alpha", "b", "b1", "beta",
    "c", "delta", "epsilon", "g2", "g3", "gamma", "lambda", "w",
)
SYM_INDEX = {name: i for i, name in enumerate(SYMBOLS)}

_NSYMS = len(SYMBOLS)
_FIELD = 8
_SHIFTS = tuple(_FIELD * (_NSYMS - 1 - i) for i in range(_NSYMS))
_DEG_SHIFT = _FIELD * _NSYMS
_MAX_DEG = (1 << _FIELD) - 1

ScalarLike = Union[int, str, Rat]


def rat(num: ScalarLike = 0, den: int = 1) -> Rat:
    """Exact rational from ints, a "p/q" string, or another rational."""
    if den != 1:
        return Rat(num) / Rat(den)
    return Rat(num)


def _pack(exps: Iterable[tuple[int, int]]) -> int:
    key = 0
    deg = 0
    for idx, e in exps:
        if e < 0:
            raise ValueError("negative exponent")
        deg += e
        key += e << _SHIFTS[idx]
    if deg > _MAX_DEG:
        raise OverflowError(f"monomial degree {deg} exceeds representation limit")
    return key | (deg << _DEG_SHIFT)


def _unpack(key: int) -> tuple[int, ...]:
    return tuple((key >> s) & _MAX_DEG for s in _SHIFTS)


def _key_degree(key: int) -> int:
    return key >> _DEG_SHIFT


class MultiPoly:
    """Sparse polynomial in the closed symbol universe, exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Rat] | None = None):
        # Internal constructor: `terms` must already be canonical
        # (packed keys, no zero coefficients).
        self.terms = terms if terms is not None else {}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly({})

    @staticmethod
    def const(value: ScalarLike) -> "MultiPoly":
        q = rat(value)
        return MultiPoly({0: q} if q else {})

    @staticmethod
    def sym(name: str) -> "MultiPoly":
        return MultiPoly({_pack([(SYM_INDEX[name], 1)]): Rat(1)})

    @staticmethod
    def monomial(coeff: ScalarLike, exps: Mapping[str, int]) -> "MultiPoly":
        q = rat(coeff)
        if not q:
            return MultiPoly({})
        key = _pack((SYM_INDEX[n], e) for n, e in exps.items() if e)
        return MultiPoly({key: q})

    # -- ring operations ---------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Rat)):
            return self.terms == MultiPoly.const(other).terms
        return NotImplemented

    __hash__ = None  # mutable dict inside; not intended as a dict key

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({k: -c for k, c in self.terms.items()})

    def __add__(self, other) -> "MultiPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k)
            if s is None:
                out[k] = c
            else:
                s = s + c
                if s:
                    out[k] = s
                else:
                    del out[k]
        return MultiPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "MultiPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Rat)):
            q = Rat(other)
            if not q:
                return MultiPoly({})
            return MultiPoly({k: c * q for k, c in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Rat] = {}
        get = out.get
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                s = get(k)
                out[k] = c1 * c2 if s is None else s + c1 * c2
        out = {k: c for k, c in out.items() if c}
        if out and _key_degree(max(out)) > _MAX_DEG:
            raise OverflowError("product degree exceeds representation limit")
        return MultiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MultiPoly":
        # Division by a nonzero rational only; the ring itself has no division.
        q = Rat(other)
        return MultiPoly({k: c / q for k, c in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure queries -------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return _key_degree(max(self.terms))

    def degree_in(self, name: str) -> int:
        shift = _SHIFTS[SYM_INDEX[name]]
        if not self.terms:
            return -1
        return max((k >> shift) & _MAX_DEG for k in self.terms)

    def coefficient_in(self, name: str, power: int) -> "MultiPoly":
        """Coefficient of name**power, as a polynomial in the other symbols."""
        idx = SYM_INDEX[name]
        shift = _SHIFTS[idx]
        strip = (power << shift) | (power << _DEG_SHIFT)
        out = {}
        for k, c in self.terms.items():
            if (k >> shift) & _MAX_DEG == power:
                out[k - strip] = c
        return MultiPoly(out)

    def symbols_used(self) -> tuple[str, ...]:
        used = [False] * _NSYMS
        for k in self.terms:
            for i, s in enumerate(_SHIFTS):
                if (k >> s) & _MAX_DEG:
                    used[i] = True
        return tuple(SYMBOLS[i] for i in range(_NSYMS) if used[i])

    def as_rational(self) -> Rat | None:
        """The value if this is a constant polynomial, else None."""
        if not self.terms:
            return Rat(0)
        if len(self.terms) == 1 and 0 in self.terms:
            return self.terms[0]
        return None

    def as_monomial(self) -> tuple[Rat, dict[str, int]] | None:
        """(coeff, exponents) if this has a single term, else None."""
        if len(self.terms) != 1:
            return None
        k, c = next(iter(self.terms.items()))
        exps = _unpack(k)
        return c, {SYMBOLS[i]: e for i, e in enumerate(exps) if e}

    # -- substitution and calculus -----------------------------------------

    def substitute(self, bindings: Mapping[str, "MultiPoly | ScalarLike"]) -> "MultiPoly":
        """Simultaneous substitution of polynomials for symbols."""
        bound = {SYM_INDEX[n]: _coerce(v) for n, v in bindings.items()}
        if not bound:
            return self
        pow_cache: dict[tuple[int, int], MultiPoly] = {}

        def bpow(idx: int, e: int) -> MultiPoly:
            p = pow_cache.get((idx, e))
            if p is None:
                p = bound[idx] ** e
                pow_cache[(idx, e)] = p
            return p

        acc = MultiPoly({})
        for k, c in self.terms.items():
            exps = _unpack(k)
            free_key = _pack(
                (i, e) for i, e in enumerate(exps) if e and i not in bound
            )
            term = MultiPoly({free_key: c})
            for i, e in enumerate(exps):
                if e and i in bound:
                    term = term * bpow(i, e)
            acc = acc + term
        return acc

    def substitute_square(self, name: str, replacement: "MultiPoly") -> "MultiPoly":
        """Rewrite name**(2q+r) -> replacement**q * name**r, greedily."""
        idx = SYM_INDEX[name]
        shift = _SHIFTS[idx]
        acc = MultiPoly({})
        plain: dict[int, Rat] = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _MAX_DEG
            if e < 2:
                plain[k] = c
                continue
            q, r = divmod(e, 2)
            strip = ((e - r) << shift) | ((e - r) << _DEG_SHIFT)
            acc = acc + MultiPoly({k - strip: c}) * (replacement ** q)
        return acc + MultiPoly(plain)

    def derivation(self, rules: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Apply the derivation defined by d(sym) = rules[sym] (0 if absent)."""
        ridx = {SYM_INDEX[n]: p for n, p in rules.items()}
        acc = MultiPoly({})
        for k, c in self.terms.items():
            for i, rule in ridx.items():
                e = (k >> _SHIFTS[i]) & _MAX_DEG
                if e:
                    down = (1 << _SHIFTS[i]) | (1 << _DEG_SHIFT)
                    acc = acc + MultiPoly({k - down: c * e}) * rule
        return acc

    def divide_exact(self, coeff: Rat, exps: Mapping[str, int]) -> "MultiPoly":
        """Exact division by a monomial; raises if any term is not divisible."""
        down = 0
        deg = 0
        for n, e in exps.items():
            down |= e << _SHIFTS[SYM_INDEX[n]]
            deg += e
        down |= deg << _DEG_SHIFT
        out = {}
        for k, c in self.terms.items():
            for n, e in exps.items():
                if (k >> _SHIFTS[SYM_INDEX[n]]) & _MAX_DEG < e:
                    raise ValueError(f"term not divisible by {n}^{e}")
            out[k - down] = c / coeff
        return MultiPoly(out)

    # -- evaluation ----------------------------------------------------------

    def eval(self, point: Mapping[str, object]):
        """Evaluate at a point.

        Exact (rational) when every binding is an int or rational; complex
        double precision when any binding is a float or complex.  Every
        symbol occurring in the polynomial must be bound.
        """
        numeric = any(isinstance(v, (float, complex)) for v in point.values())
        vals: list[object] = [None] * _NSYMS
        for n, v in point.items():
            vals[SYM_INDEX[n]] = _to_complex(v) if numeric else Rat(v)
        total = complex(0) if numeric else Rat(0)
        for k, c in self.terms.items():
            term = _to_complex(c) if numeric else c
            for i, s in enumerate(_SHIFTS):
                e = (k >> s) & _MAX_DEG
                if e:
                    if vals[i] is None:
                        raise ValueError(f"unbound symbol: {SYMBOLS[i]}")
                    term = term * vals[i] ** e
            total = total + term
        return total

    # -- canonical text ------------------------------------------------------

    def text(self) -> str:
        """Deterministic serialization: graded-lex descending terms."""
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            c = self.terms[k]
            mon = "*".join(
                SYMBOLS[i] if e == 1 else f"{SYMBOLS[i]}^{e}"
                for i, e in enumerate(_unpack(k))
                if e
            )
            if not mon:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mon
            else:
                body = f"{abs(c)}*{mon}"
            parts.append((c < 0, body))
        first_neg, first = parts[0]
        out = ("-" if first_neg else "") + first
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    __str__ = text

    def __repr__(self) -> str:
        return f"MultiPoly({self.text()})"

    @staticmethod
    def parse(text: str) -> "MultiPoly":
        """Inverse of text() (also accepts unnormalized term order)."""
        s = text.strip()
        if s == "0":
            return MultiPoly.zero()
        s = s.replace(" - ", " + -")
        acc = MultiPoly.zero()
        for tok in s.split(" + "):
            tok = tok.strip()
            neg = tok.startswith("-")
            if neg:
                tok = tok[1:]
            coeff = Rat(1)
            exps: dict[str, int] = {}
            for factor in tok.split("*"):
                if factor and (factor[0].isdigit()):
                    coeff = coeff * Rat(factor)
                    continue
                name, _, e = factor.partition("^")
                if name not in SYM_INDEX:
                    raise ValueError(f"unknown symbol in polynomial text: {name!r}")
                exps[name] = exps.get(name, 0) + (int(e) if e else 1)
            acc = acc + MultiPoly.monomial(-coeff if neg else coeff, exps)
        return acc


def _to_complex(v) -> complex:
    if isinstance(v, complex):
        return v
    return complex(float(v))


def _coerce(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, (int, str, Rat)):
        return MultiPoly.const(value)
    return NotImplemented


def sym(name: str) -> MultiPoly:
    """The symbol `name` as a polynomial."""
    return MultiPoly.sym(name)


def const(value: ScalarLike) -> MultiPoly:
    """A constant polynomial."""
    return MultiPoly.const(value)


ZERO = MultiPoly.zero()
ONE = MultiPoly.const(1)
