"""Elements of F_q(t) in canonical form, with a text parser and printer."""

from __future__ import annotations

import re

from . import poly as P
from .fields import GF, gf


class RatFunc:
    """num/den with gcd(num, den) = 1 and den monic; zero is 0/1."""

    __slots__ = ("F", "num", "den", "_hash")

    def __init__(self, F: GF, num: P.Poly, den: P.Poly = P.ONE, *, reduced: bool = False):
        num, den = P.trim(num), P.trim(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            if not num:
                den = P.ONE
            else:
                g = P.gcd(F, num, den)
                if len(g) > 1:
                    num = P.exact_div(F, num, g)
                    den = P.exact_div(F, den, g)
            if den[-1] != 1:
                c = F.inv(den[-1])
                num, den = P.scale(F, num, c), P.scale(F, den, c)
        self.F = F
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, F: GF, c: int) -> "RatFunc":
        return cls(F, P.const(F, c), P.ONE, reduced=True)

    @classmethod
    def t(cls, F: GF) -> "RatFunc":
        return cls(F, P.X, P.ONE, reduced=True)

    @classmethod
    def tpow(cls, F: GF, n: int) -> "RatFunc":
        if n >= 0:
            return cls(F, P.monomial(1, n), P.ONE, reduced=True)
        return cls(F, P.ONE, P.monomial(1, -n), reduced=True)

    @classmethod
    def from_int(cls, F: GF, n: int) -> "RatFunc":
        return cls.const(F, F.from_int(n))

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.F is not self.F:
                raise ValueError("mixing elements of different fields")
            return other
        if isinstance(other, int):
            return RatFunc.from_int(self.F, other)
        return NotImplemented

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == P.ONE and self.den == P.ONE

    def is_const(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def is_poly(self) -> bool:
        return len(self.den) == 1

    def const_value(self) -> int:
        if not self.is_const():
            raise ValueError("not a constant")
        return self.num[0] if self.num else 0

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.F
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            if len(self.den) == 1:
                return RatFunc(F, P.add(F, self.num, o.num), P.ONE, reduced=True)
            return RatFunc(F, P.add(F, self.num, o.num), self.den)
        g = P.gcd(F, self.den, o.den)
        if len(g) == 1:
            num = P.add(F, P.mul(F, self.num, o.den), P.mul(F, o.num, self.den))
            return RatFunc(F, num, P.mul(F, self.den, o.den), reduced=True)
        d1 = P.exact_div(F, self.den, g)
        d2 = P.exact_div(F, o.den, g)
        num = P.add(F, P.mul(F, self.num, d2), P.mul(F, o.num, d1))
        return RatFunc(F, num, P.mul(F, P.mul(F, d1, d2), g))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.F, P.neg(self.F, self.num), self.den, reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.F
        if not self.num or not o.num:
            return RatFunc(F, (), P.ONE, reduced=True)
        if len(self.den) == 1 and len(o.den) == 1:
            return RatFunc(F, P.mul(F, self.num, o.num), P.ONE, reduced=True)
        a, b, c, d = self.num, self.den, o.num, o.den
        g1 = P.gcd(F, a, d)
        if len(g1) > 1:
            a, d = P.exact_div(F, a, g1), P.exact_div(F, d, g1)
        g2 = P.gcd(F, c, b)
        if len(g2) > 1:
            c, b = P.exact_div(F, c, g2), P.exact_div(F, b, g2)
        num, den = P.mul(F, a, c), P.mul(F, b, d)
        if den[-1] != 1:
            k = F.inv(den[-1])
            num, den = P.scale(F, num, k), P.scale(F, den, k)
        return RatFunc(F, num, den, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        F = self.F
        c = F.inv(self.num[-1])
        return RatFunc(F, P.scale(F, self.den, c), P.scale(F, self.num, c), reduced=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        F = self.F
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return RatFunc(F, P.ONE, P.ONE, reduced=True)
        return RatFunc(F, P.pow_(F, self.num, n), P.pow_(F, self.den, n), reduced=True)

    def frobenius(self, times: int = 1) -> "RatFunc":
        F = self.F
        return RatFunc(F, P.frobenius(F, self.num, times), P.frobenius(F, self.den, times), reduced=True)

    def pth_root(self) -> "RatFunc | None":
        F = self.F
        n, d = P.pth_root(F, self.num), P.pth_root(F, self.den)
        if n is None or d is None:
            return None
        return RatFunc(F, n, d, reduced=True)

    def scale_const(self, c: int) -> "RatFunc":
        return RatFunc(self.F, P.scale(self.F, self.num, c), self.den, reduced=True)

    # -- identity -----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = RatFunc.from_int(self.F, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.F is other.F and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.F.p, self.F.k, self.num, self.den))
        return self._hash

    def height(self) -> int:
        if not self.num:
            raise ValueError("height of zero is undefined")
        return max(len(self.num), len(self.den)) - 1

    def sort_key(self) -> tuple:
        h = max(len(self.num), len(self.den)) - 1 if self.num else 0
        return (h, str(self))

    def __str__(self) -> str:
        return f"({P.to_str(self.F, self.num)})/({P.to_str(self.F, self.den)})"

    def pretty(self) -> str:
        n = P.to_str(self.F, self.num)
        if self.den == P.ONE:
            return n
        wrap = lambda s: s if re.fullmatch(r"[\w^*]+", s) else f"({s})"
        return f"{wrap(n)}/{wrap(P.to_str(self.F, self.den))}"

    def __repr__(self) -> str:
        return f"RatFunc[{self.pretty()}]"


# -- parser -------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:  # pragma: no cover - the regex always matches non-space
            raise ParseError("unexpected character", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class ExprParser:
    """Recursive-descent parser for + - * / ^ over integers, t, g and named symbols.

    `atom_hook(name)` resolves names other than t and g; it must return a
    value supporting the ring operations with RatFunc and ints.
    """

    def __init__(self, F: GF, text: str, atom_hook=None):
        self.F = F
        self.toks = _tokenize(text)
        self.i = 0
        self.atom_hook = atom_hook
        self.text = text

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.take()
        if tok[1] != op or tok[0] != "op":
            raise ParseError(f"expected '{op}'", tok[2])

    def parse(self):
        val = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected '{tok[1]}'", tok[2])
        return val

    def expr(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            val = self.term()
            if tok[1] == "-":
                val = -val
        else:
            val = self.term()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                val = val + rhs if tok[1] == "+" else val - rhs
            else:
                return val

    def term(self):
        val = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                val = val * self.factor()
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                rhs = self.factor()
                if isinstance(rhs, RatFunc) and rhs.is_zero():
                    raise ParseError("division by zero", tok[2])
                val = val / rhs
            else:
                return val

    def factor(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            sign = 1
            t2 = self.peek()
            paren = False
            if t2[0] == "op" and t2[1] == "(":
                self.take()
                paren = True
                t2 = self.peek()
            if t2[0] == "op" and t2[1] == "-":
                self.take()
                sign = -1
                t2 = self.peek()
            if t2[0] != "num":
                raise ParseError("expected integer exponent", t2[2])
            self.take()
            if paren:
                self.expect(")")
            e = sign * int(t2[1])
            if e < 0 and isinstance(base, RatFunc) and base.is_zero():
                raise ParseError("negative power of zero", t2[2])
            return base**e
        return base

    def atom(self):
        tok = self.take()
        F = self.F
        if tok[0] == "num":
            return RatFunc.from_int(F, int(tok[1]))
        if tok[0] == "name":
            if tok[1] == "t":
                return RatFunc.t(F)
            if tok[1] == "g":
                return RatFunc.const(F, F.gen)
            if self.atom_hook is not None:
                val = self.atom_hook(tok[1])
                if val is not None:
                    return val
            raise ParseError(f"unknown symbol '{tok[1]}'", tok[2])
        if tok[0] == "op" and tok[1] == "(":
            val = self.expr()
            self.expect(")")
            return val
        raise ParseError(f"unexpected '{tok[1] or 'end of input'}'", tok[2])


def parse_ratfunc(F: GF, text: str) -> RatFunc:
    val = ExprParser(F, text).parse()
    if not isinstance(val, RatFunc):  # pragma: no cover - guarded by the grammar
        raise ParseError("not a rational function", 0)
    return val


def field_of(p: int, k: int = 1, modulus=None) -> GF:
    return gf(p, k, tuple(modulus) if modulus is not None else None)
