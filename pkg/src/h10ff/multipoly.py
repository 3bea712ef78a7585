"""Sparse multivariate polynomials over F_q(t) in named unknowns."""

from __future__ import annotations

from typing import Mapping

from .fields import GF
from .ratfunc import ExprParser, RatFunc

Monomial = tuple  # sorted tuple of (name, exponent) with exponent >= 1


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for n, e in b:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items()))


class MultiPoly:
    __slots__ = ("F", "terms")

    def __init__(self, F: GF, terms: Mapping[Monomial, RatFunc] | None = None):
        self.F = F
        self.terms: dict[Monomial, RatFunc] = {}
        if terms:
            for m, c in terms.items():
                if not c.is_zero():
                    self.terms[m] = c

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, F: GF, c: RatFunc | int) -> "MultiPoly":
        if isinstance(c, int):
            c = RatFunc.from_int(F, c)
        return cls(F, {(): c})

    @classmethod
    def var(cls, F: GF, name: str, exp: int = 1) -> "MultiPoly":
        return cls(F, {((name, exp),) if exp else (): RatFunc.const(F, 1)})

    @classmethod
    def zero(cls, F: GF) -> "MultiPoly":
        return cls(F)

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (RatFunc, int)):
            return MultiPoly.const(self.F, other)
        return NotImplemented

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for m, c in o.terms.items():
            if m in out:
                s = out[m] + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return MultiPoly(self.F, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.F, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out: dict[Monomial, RatFunc] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                if m in out:
                    out[m] = out[m] + c
                else:
                    out[m] = c
        return MultiPoly(self.F, {m: c for m, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return MultiPoly(self.F, {tuple((v, e * n) for v, e in m): c**n})
        result = MultiPoly.const(self.F, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, int):
            other = RatFunc.from_int(self.F, other)
        if isinstance(other, RatFunc):
            inv = other.inverse()
            return MultiPoly(self.F, {m: c * inv for m, c in self.terms.items()})
        if isinstance(other, MultiPoly) and other.is_const():
            return self / other.const_value()
        raise TypeError("division of a polynomial by a non-constant")

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def const_value(self) -> RatFunc:
        if not self.is_const():
            raise ValueError("not a constant polynomial")
        return self.terms.get((), RatFunc.const(self.F, 0))

    def unknowns(self) -> set[str]:
        return {n for m in self.terms for n, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[Monomial, RatFunc]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- evaluation ---------------------------------------------------
    def evaluate(self, values: Mapping[str, RatFunc]) -> RatFunc:
        F = self.F
        acc = RatFunc.const(F, 0)
        cache: dict[tuple[str, int], RatFunc] = {}
        for m, c in self.terms.items():
            val = c
            for n, e in m:
                key = (n, e)
                pw = cache.get(key)
                if pw is None:
                    pw = values[n] ** e
                    cache[key] = pw
                val = val * pw
                if val.is_zero():
                    break
            acc = acc + val
        return acc

    def substitute(self, values: Mapping[str, "MultiPoly | RatFunc"]) -> "MultiPoly":
        """Replace some unknowns by polynomials or field elements."""
        F = self.F
        out = MultiPoly.zero(F)
        cache: dict[tuple[str, int], MultiPoly] = {}
        for m, c in self.terms.items():
            rest = []
            term = MultiPoly.const(F, c)
            for n, e in m:
                if n in values:
                    key = (n, e)
                    if key not in cache:
                        v = values[n]
                        v = v if isinstance(v, MultiPoly) else MultiPoly.const(F, v)
                        cache[key] = v**e
                    term = term * cache[key]
                else:
                    rest.append((n, e))
            if rest:
                term = term * MultiPoly(F, {tuple(rest): RatFunc.const(F, 1)})
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        out: dict[Monomial, RatFunc] = {}
        for m, c in self.terms.items():
            d: dict[str, int] = {}
            for n, e in m:
                n2 = mapping.get(n, n)
                d[n2] = d.get(n2, 0) + e
            out[tuple(sorted(d.items()))] = c
        return MultiPoly(self.F, out)

    def coefficient_in(self, name: str) -> dict[int, "MultiPoly"]:
        """Group terms by the exponent of one unknown."""
        F = self.F
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(name, 0)
            out.setdefault(e, {})[tuple(sorted(d.items()))] = c
        return {e: MultiPoly(F, t) for e, t in out.items()}

    # -- text ---------------------------------------------------------
    def to_json(self) -> list[dict]:
        return [{"c": str(c), "m": dict(m)} for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, F: GF, data: list[dict], declared: set[str] | None = None) -> "MultiPoly":
        from .ratfunc import parse_ratfunc

        out: dict[Monomial, RatFunc] = {}
        for term in data:
            if not isinstance(term, dict) or set(term) != {"c", "m"}:
                raise ValueError("malformed term")
            c = parse_ratfunc(F, term["c"])
            mono = []
            for n, e in term["m"].items():
                if declared is not None and n not in declared:
                    raise ValueError(f"undeclared unknown '{n}'")
                if not isinstance(e, int) or e < 1:
                    raise ValueError(f"bad exponent for '{n}'")
                mono.append((n, e))
            m = tuple(sorted(mono))
            if m in out:
                raise ValueError("duplicate monomial")
            if c.is_zero():
                raise ValueError("zero coefficient")
            out[m] = c
        return cls(F, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
            cs = c.pretty()
            if not m:
                parts.append(f"({cs})" if " " in cs or "/" in cs else cs)
            elif c.is_one():
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__


def parse_multipoly(F: GF, text: str, unknowns: set[str]) -> MultiPoly:
    """Parse an expression in t, g and the given unknowns (nonnegative powers only)."""

    def hook(name):
        if name in unknowns:
            return MultiPoly.var(F, name)
        return None

    val = _PolyExprParser(F, text, hook).parse()
    return val if isinstance(val, MultiPoly) else MultiPoly.const(F, val)


class _PolyExprParser(ExprParser):
    def atom(self):
        val = super().atom()
        return val

    def term(self):
        val = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                rhs = self.factor()
                val = _mul(self.F, val, rhs)
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                rhs = self.factor()
                if isinstance(rhs, MultiPoly):
                    rhs = rhs.const_value()
                val = val / rhs
            else:
                return val


def _mul(F, a, b):
    if isinstance(a, MultiPoly) or isinstance(b, MultiPoly):
        a = a if isinstance(a, MultiPoly) else MultiPoly.const(F, a)
        return a * b
    return a * b
