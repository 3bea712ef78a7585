"""Places, divisors, valuations and genus-0 Riemann-Roch spaces of F_q(t)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import poly as P
from .fields import GF
from .linalg import nullspace_fq
from .ratfunc import RatFunc, parse_ratfunc


class OrderOfZeroError(ValueError):
    def __init__(self):
        super().__init__("order of zero undefined")


class EnlargeFieldError(RuntimeError):
    """The constant field is too small for the requested construction."""


@dataclass(frozen=True)
class Place:
    """A finite place (monic irreducible polynomial) or the infinite place (poly=None)."""

    poly: P.Poly | None = None

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    def key(self) -> tuple:
        if self.poly is None:
            return (1, ())
        return (0, P.poly_key(self.poly))

    def to_str(self, F: GF) -> str:
        return "inf" if self.poly is None else P.to_str(F, self.poly)


INF = Place(None)


def finite_place(F: GF, f: P.Poly) -> Place:
    f = P.monic(F, P.trim(f))
    if not P.is_irreducible(F, f):
        raise ValueError("a finite place needs an irreducible polynomial")
    return Place(f)


def parse_place(F: GF, text: str) -> Place:
    if text.strip() == "inf":
        return INF
    x = parse_ratfunc(F, text)
    if not x.is_poly():
        raise ValueError("place must be a polynomial")
    return finite_place(F, x.num)


class Divisor:
    """Finite formal sum of places; zero multiplicities are dropped."""

    __slots__ = ("_m",)

    def __init__(self, mults: dict[Place, int] | None = None):
        self._m = {pl: n for pl, n in (mults or {}).items() if n}

    def __getitem__(self, pl: Place) -> int:
        return self._m.get(pl, 0)

    def items(self):
        return sorted(self._m.items(), key=lambda kv: kv[0].key())

    def support(self) -> list[Place]:
        return [pl for pl, _ in self.items()]

    def degree(self) -> int:
        return sum(n * pl.degree for pl, n in self._m.items())

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self._m)
        for pl, n in other._m.items():
            out[pl] = out.get(pl, 0) + n
        return Divisor(out)

    def __neg__(self) -> "Divisor":
        return Divisor({pl: -n for pl, n in self._m.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def scale(self, k: int) -> "Divisor":
        return Divisor({pl: k * n for pl, n in self._m.items()})

    def positive_part(self) -> "Divisor":
        return Divisor({pl: n for pl, n in self._m.items() if n > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({pl: -n for pl, n in self._m.items() if n < 0})

    def is_effective(self) -> bool:
        return all(n >= 0 for n in self._m.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, Divisor) and self._m == other._m

    def __hash__(self) -> int:
        return hash(frozenset(self._m.items()))

    def __len__(self) -> int:
        return len(self._m)

    def to_json(self, F: GF) -> dict[str, int]:
        return {pl.to_str(F): n for pl, n in self.items()}

    @classmethod
    def from_json(cls, F: GF, data: dict[str, int]) -> "Divisor":
        return cls({parse_place(F, k): int(v) for k, v in data.items()})

    def __repr__(self) -> str:
        return f"Divisor({self._m})"


# -- valuations ---------------------------------------------------------

def _poly_order(F: GF, f: P.Poly, pl: P.Poly) -> int:
    n = 0
    while True:
        q, r = P.divmod_(F, f, pl)
        if r:
            return n
        n += 1
        f = q


def ord_at(x: RatFunc, pl: Place) -> int:
    if x.is_zero():
        raise OrderOfZeroError()
    if pl.poly is None:
        return len(x.den) - len(x.num)
    return _poly_order(x.F, x.num, pl.poly) - _poly_order(x.F, x.den, pl.poly)


def height(x: RatFunc) -> int:
    if x.is_zero():
        raise OrderOfZeroError()
    return x.height()


def divisor_of(x: RatFunc) -> Divisor:
    if x.is_zero():
        raise OrderOfZeroError()
    F = x.F
    out: dict[Place, int] = {}
    for f, m in P.factor(F, x.num)[1]:
        out[Place(f)] = m
    for f, m in P.factor(F, x.den)[1]:
        out[Place(f)] = out.get(Place(f), 0) - m
    out[INF] = len(x.den) - len(x.num)
    return Divisor(out)


def zero_divisor(x: RatFunc) -> Divisor:
    return divisor_of(x).positive_part()


def pole_divisor(x: RatFunc) -> Divisor:
    return divisor_of(x).negative_part()


def derivative(x: RatFunc) -> RatFunc:
    F = x.F
    n, d = x.num, x.den
    num = P.sub(F, P.mul(F, P.derivative(F, n), d), P.mul(F, n, P.derivative(F, d)))
    return RatFunc(F, num, P.mul(F, d, d))


def local_derivation_order(pl: Place) -> int:
    """Order at pl of dt/dpi for a local parameter pi: 0 at finite places, -2 at infinity.

    At infinity pi = 1/t, so t = pi^-1 and dt/dpi = -pi^-2.
    """
    return -2 if pl.poly is None else 0


# -- predicates ---------------------------------------------------------

def is_pth_power_divisor(D: Divisor, e: int) -> bool:
    return all(n % e == 0 for _, n in D.items())


def is_squarefree_away_from(x: RatFunc, excluded: set[Place] | frozenset[Place]) -> bool:
    return all(abs(n) == 1 for pl, n in divisor_of(x).items() if pl not in excluded)


# -- Riemann-Roch at genus 0 ------------------------------------------

def riemann_roch_basis(F: GF, D: Divisor) -> list[RatFunc]:
    """Basis of L(D) = {f : ord_P(f) >= -D(P) for all P}.

    Every f in L(D) is n/d0 with d0 the finite pole allowance, n a polynomial
    of bounded degree; the zero requirements are linear conditions on the
    coefficients of n, solved as a nullspace over F_q.
    """
    d0 = P.ONE
    zero_req: list[tuple[P.Poly, int]] = []
    for pl, n in D.items():
        if pl.poly is None:
            continue
        if n > 0:
            d0 = P.mul(F, d0, P.pow_(F, pl.poly, n))
        else:
            zero_req.append((pl.poly, -n))
    max_deg = len(d0) - 1 + D[INF]
    if max_deg < 0:
        return []
    ncols = max_deg + 1
    rows: list[list[int]] = []
    for f, e in zero_req:
        modulus = P.pow_(F, f, e)
        # column j contributes t^j mod f^e; every remainder coefficient must vanish
        cols = [P.rem(F, P.monomial(1, j), modulus) for j in range(ncols)]
        for i in range(len(modulus) - 1):
            rows.append([c[i] if i < len(c) else 0 for c in cols])
    basis = []
    for vec in nullspace_fq(F, rows, ncols):
        basis.append(RatFunc(F, P.trim(vec), d0))
    return basis


def separating_element_candidates(F: GF, D: Divisor):
    """All nonzero elements of L(D), in canonical order of coefficient vectors."""
    basis = riemann_roch_basis(F, D)
    zero = RatFunc.const(F, 0)
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        if not any(coeffs):
            continue
        y = zero
        for c, b in zip(coeffs, basis):
            if c:
                y = y + b.scale_const(c)
        yield y


def construct_separating_element(F: GF, A: Divisor, B: Divisor, T: Place) -> RatFunc:
    """y with pole divisor T^(deg A + 1) and zero divisor A*C, C a degree-1 place.

    C avoids A, B and T; when T is finite C is also required to be finite.
    """
    if T.degree != 1:
        raise ValueError("the pole place must have degree 1")
    if not A.is_effective() or not B.is_effective():
        raise ValueError("A and B must be integral divisors")
    sa, sb = set(A.support()), set(B.support())
    if sa & sb or T in sa or T in sb:
        raise ValueError("A, B and T must be pairwise coprime")
    dA = A.degree()
    U = Divisor({T: dA + 1}) - A
    for y in separating_element_candidates(F, U):
        div = divisor_of(y)
        if div[T] != -(dA + 1):
            continue
        if any(div[pl] != n for pl, n in A.items()):
            continue
        extra = [(pl, n) for pl, n in div.items() if n > 0 and pl not in sa]
        if len(extra) != 1:
            continue
        C, n = extra[0]
        if n != 1 or C.degree != 1 or C in sb:
            continue
        if not T.is_infinite and C.is_infinite:
            continue
        return y
    raise EnlargeFieldError(
        f"no admissible element over F_{F.q}; enlarge k (pass to a larger constant field)"
    )
