"""Integrality at the zero of t: h_w, its valuations, norm forms and the INT system.

The tower over K = F(t) is K(delta, beta_w) with the constant extension
K(alpha) on top.  Two branches:

* q != p (Kummer): delta^q = t + 1, beta^q = 1/h_w + 1, alpha^q = a;
* q == p (Artin-Schreier): delta^p - delta + t = 0, beta^p - beta - 1/h_w = 0,
  alpha^p - alpha + a = 0.

A norm from L(alpha) to L = K(delta, beta) is written through the norm form
P(a_0, ..., a_{q-1}), a resultant, and pushed down to K by expanding every
a_i in the basis delta^r beta^s.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import poly as P
from .fields import GF, gf
from .linalg import SingularSystem, solve_exact
from .multipoly import MultiPoly
from .places import INF, Place, divisor_of, ord_at
from .ratfunc import RatFunc
from .system import Equation, EquationSystem
from .witness import Verdict, verify_assignment

T_PLACE = Place((0, 1))


class IntegralityError(ValueError):
    pass


# -- h_w and its valuations ------------------------------------------------

def compute_h(w: RatFunc, q: int) -> RatFunc:
    t = RatFunc.t(w.F)
    return t.inverse() * w**q + t ** (-q)


def pole_obstruction_at_zero_of_t(w: RatFunc, q: int) -> bool:
    h = compute_h(w, q)
    obstructed = ord_at(h, T_PLACE) % q != 0
    has_pole = (not w.is_zero()) and ord_at(w, T_PLACE) < 0
    if obstructed != has_pole:
        raise AssertionError(f"valuation dichotomy broken for w = {w}")
    return obstructed


def ramification_index(w: RatFunc, q: int, pl: Place) -> int:
    """e of a prime of N(beta_w) over the place pl of K (N = K(delta)).

    Kummer (q != p): delta ramifies where q does not divide ord(t + 1), beta
    where q does not divide ord(1/h_w + 1) after delta; the two never stack
    because a ramified delta makes the order of 1/h_w + 1 divisible by q.
    Artin-Schreier (q == p): delta ramifies only at infinity; beta ramifies
    where 1/h_w has a pole of order prime to p.  Poles of order divisible by p
    are reported as unramified, which only matters when p already divides
    ord(h_w).
    """
    F = w.F
    t = RatFunc.t(F)
    hinv = compute_h(w, q).inverse()
    if q != F.p:
        if ord_at(t + 1, pl) % q:
            return q
        B = hinv + 1
        return q if not B.is_zero() and ord_at(B, pl) % q else 1
    if pl.is_infinite:
        return q
    o = ord_at(hinv, pl)
    return q if o < 0 and o % q else 1


def divisor_mod_q_profile(w: RatFunc, q: int) -> dict[Place, int]:
    """ord(h_w) mod q at the primes of N(beta_w) above each finite place in the support of div(h_w).

    All primes above one place of K share the same ramification index, so
    the residue e * ord_P(h_w) mod q is reported per place P of K.
    """
    h = compute_h(w, q)
    return {pl: (ramification_index(w, q, pl) * n) % q
            for pl, n in divisor_of(h).items() if not pl.is_infinite}


# -- generic coefficient helpers ------------------------------------------

def _coerce(F: GF, x):
    if isinstance(x, (RatFunc, MultiPoly)):
        return x
    if isinstance(x, int):
        return RatFunc.from_int(F, x)
    raise TypeError(f"cannot use {type(x)} as a coefficient")


def _is_zero(x) -> bool:
    return x.is_zero()


# -- tower specification --------------------------------------------------

@dataclass(frozen=True)
class TowerSpec:
    q: int
    field: GF
    a: int  # constant defining alpha
    xi: int | None  # primitive q-th root of unity (Kummer branch)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def branch(self) -> str:
        return "q=p" if self.q == self.p else "q!=p"

    def alpha_min(self) -> list:
        """Coefficients (low to high) of the polynomial defining alpha."""
        F, q = self.field, self.q
        one = RatFunc.const(F, 1)
        zero = RatFunc.const(F, 0)
        a = RatFunc.const(F, self.a)
        if self.branch == "q=p":
            return [a, -one] + [zero] * (q - 2) + [one]
        return [-a] + [zero] * (q - 1) + [one]

    def delta_min(self) -> list:
        F, q = self.field, self.q
        t = RatFunc.t(F)
        one, zero = RatFunc.const(F, 1), RatFunc.const(F, 0)
        if self.branch == "q=p":
            return [t, -one] + [zero] * (q - 2) + [one]
        return [-(t + 1)] + [zero] * (q - 1) + [one]

    def beta_min(self, hinv) -> list:
        """Coefficients for beta_w, given 1/h_w (a RatFunc or a symbolic MultiPoly)."""
        F, q = self.field, self.q
        one = RatFunc.const(F, 1)
        zero = RatFunc.const(F, 0)
        if self.branch == "q=p":
            return [-hinv, -one] + [zero] * (q - 2) + [one]
        return [-(hinv + 1)] + [zero] * (q - 1) + [one]

    def conjugate_rule(self) -> str:
        return "alpha_j = alpha + j" if self.branch == "q=p" else "alpha_j = xi^j * alpha"

    def to_json(self) -> dict:
        F = self.field
        return {
            "branch": self.branch, "q": self.q, "p": self.p, "a": F.element_str(self.a),
            "xi": None if self.xi is None else F.element_str(self.xi),
            "field": F.spec(),
            "deltaMin": "T^p - T + t" if self.branch == "q=p" else "T^q - (t + 1)",
            "alphaMin": "T^p - T + a" if self.branch == "q=p" else "T^q - a",
            "betaMin": "T^p - T - 1/h_w" if self.branch == "q=p" else "T^q - (1/h_w + 1)",
        }


def make_tower(F: GF, q: int) -> TowerSpec:
    """Pick the smallest a (by encoding) making alpha's polynomial irreducible over F."""
    if q not in (2, 3):
        raise IntegralityError("only q in {2, 3} is supported")
    xi = None
    if q != F.p:
        if (F.q - 1) % q:
            raise IntegralityError(f"F_{F.q} has no primitive {q}-th root of unity")
        xi = next(x for x in range(1, F.q) if F.order(x) == q)
    for a in range(1, F.q):
        if q == F.p:
            f = tuple([a, F.neg(1)] + [0] * (q - 2) + [1])
        else:
            f = tuple([F.neg(a)] + [0] * (q - 1) + [1])
        if P.is_irreducible(F, P.trim(f)):
            return TowerSpec(q, F, a, xi)
    raise IntegralityError(f"no constant a in F_{F.q} gives an irreducible alpha polynomial")


def default_tower(p: int) -> TowerSpec:
    """q = 2 over F_p: Kummer for odd p, Artin-Schreier for p = 2."""
    return make_tower(gf(p), 2)


# -- resultants and norm forms -------------------------------------------

def _det(matrix: list[list], zero):
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = zero
    for i in range(n):
        entry = matrix[i][0]
        if _is_zero(entry):
            continue
        minor = [row[1:] for k, row in enumerate(matrix) if k != i]
        term = entry * _det(minor, zero)
        total = total + term if i % 2 == 0 else total - term
    return total


def resultant(f: Sequence, g: Sequence, zero):
    """Sylvester resultant of f (degree m) and g (degree n, formal), coefficients low to high."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return _det(rows, zero)


@dataclass(frozen=True)
class NormFormSpec:
    q: int
    rule: str
    P: MultiPoly
    names: tuple[str, ...]


def norm_form_from_minpoly(F: GF, minpoly: Sequence, q: int, rule: str = "", prefix: str = "a") -> NormFormSpec:
    """P(a_0..a_{q-1}) = Res_T(minpoly(T), a_0 + a_1 T + ... + a_{q-1} T^{q-1})."""
    if len(minpoly) != q + 1:
        raise IntegralityError("minimal polynomial must have degree q")
    names = tuple(f"{prefix}{i}" for i in range(q))
    f = [c if isinstance(c, MultiPoly) else MultiPoly.const(F, _coerce(F, c)) for c in minpoly]
    if not (f[-1] - 1).is_zero():
        raise IntegralityError("minimal polynomial must be monic")
    g = [MultiPoly.var(F, n) for n in names]
    res = resultant(f, g, MultiPoly.zero(F))
    return NormFormSpec(q, rule, res, names)


def gen_norm_form(ts: TowerSpec) -> NormFormSpec:
    F = ts.field
    coeffs = ts.alpha_min()
    fpoly = P.trim(c.const_value() for c in coeffs)
    if not P.is_irreducible(F, fpoly):
        raise IntegralityError("alpha polynomial is reducible; alpha lies in the base field")
    return norm_form_from_minpoly(F, coeffs, ts.q, ts.conjugate_rule())


def conjugate_product(coords: Sequence, alphas: Sequence):
    """prod_j (a_0 + a_1 alpha_j + ... )."""
    acc = None
    for al in alphas:
        s = None
        pw = None
        for i, a in enumerate(coords):
            pw = al**i if i else None
            term = a if i == 0 else a * pw
            s = term if s is None else s + term
        acc = s if acc is None else acc * s
    return acc


def solve_norm_form_split(y: RatFunc, alphas: Sequence[RatFunc]) -> tuple[RatFunc, ...]:
    """Solve sum_i a_i alpha_j^i = y_j with y_1 = y, y_j = 1 otherwise (Vandermonde)."""
    F = y.F
    alphas = [_coerce(F, a) for a in alphas]
    if len(set(alphas)) != len(alphas):
        raise SingularSystem("repeated conjugates make the Vandermonde system singular")
    q = len(alphas)
    matrix = [[al**i for i in range(q)] for al in alphas]
    rhs = [y] + [RatFunc.const(F, 1)] * (q - 1)
    return tuple(solve_exact(matrix, rhs, RatFunc.const(F, 0), RatFunc.const(F, 1)))


# -- algebra over the tower -----------------------------------------------

class TowerAlgebra:
    """Commutative algebra R[g_1, ..., g_n]/(minpolys) over a coefficient ring R.

    Elements are dicts mapping exponent tuples to coefficients.
    """

    def __init__(self, F: GF, minpolys: list[list]):
        self.F = F
        self.degs = [len(m) - 1 for m in minpolys]
        # relation: g^d = sum_i rel[i] g^i
        self.rels = [[-c for c in m[:-1]] for m in minpolys]
        self.zero = RatFunc.const(F, 0)
        self._pow_tables = [self._powers(k) for k in range(len(minpolys))]

    def _powers(self, k: int) -> list[list]:
        d = self.degs[k]
        rel = self.rels[k]
        one = RatFunc.const(self.F, 1)
        table = []
        vec = [one] + [self.zero] * (d - 1)
        for e in range(2 * d - 1):
            table.append(vec)
            over = vec[-1]
            vec = [self.zero] + vec[:-1]
            if not _is_zero(over):
                vec = [v + over * r for v, r in zip(vec, rel)]
        return table

    def basis(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(d) for d in self.degs]))

    def gen(self, k: int) -> dict:
        e = [0] * len(self.degs)
        e[k] = 1
        return {tuple(e): RatFunc.const(self.F, 1)}

    def const(self, c) -> dict:
        return {(0,) * len(self.degs): c}

    def add(self, x: dict, y: dict) -> dict:
        out = dict(x)
        for k, v in y.items():
            out[k] = out[k] + v if k in out else v
        return {k: v for k, v in out.items() if not _is_zero(v)}

    def scale(self, x: dict, c) -> dict:
        return {k: v * c for k, v in x.items() if not _is_zero(v * c)}

    def neg(self, x: dict) -> dict:
        return {k: -v for k, v in x.items()}

    def mul(self, x: dict, y: dict) -> dict:
        raw: dict[tuple, object] = {}
        for e1, c1 in x.items():
            for e2, c2 in y.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                raw[e] = raw[e] + c if e in raw else c
        out: dict[tuple, object] = {}
        for e, c in raw.items():
            if _is_zero(c):
                continue
            parts = [self._pow_tables[k][ek] for k, ek in enumerate(e)]
            for combo in itertools.product(*[range(d) for d in self.degs]):
                coef = c
                skip = False
                for k, ck in enumerate(combo):
                    v = parts[k][ck]
                    if _is_zero(v):
                        skip = True
                        break
                    if not (isinstance(v, RatFunc) and v.is_one()):
                        coef = coef * v
                if skip:
                    continue
                out[combo] = out[combo] + coef if combo in out else coef
        return {k: v for k, v in out.items() if not _is_zero(v)}

    def pow(self, x: dict, n: int) -> dict:
        result = self.const(RatFunc.const(self.F, 1))
        base = x
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def eval_poly(self, poly: MultiPoly, values: dict[str, dict]) -> dict:
        """Evaluate a polynomial whose unknowns are bound to algebra elements."""
        acc: dict = {}
        cache: dict = {}
        for mono, c in poly.terms.items():
            term = self.const(c)
            for name, e in mono:
                key = (name, e)
                if key not in cache:
                    cache[key] = self.pow(values[name], e)
                term = self.mul(term, cache[key])
            acc = self.add(acc, term)
        return acc


# -- the INT system ---------------------------------------------------------

def coord_name(i: int, r: int, s: int) -> str:
    return f"a{i}_{r}_{s}"


def gen_int_definition(ts: TowerSpec) -> EquationSystem:
    """Equations over K whose solvability in (w, ...) means P(a) = h_w has a solution in L."""
    F, q = ts.field, ts.q
    nf = gen_norm_form(ts)
    hinv = MultiPoly.var(F, "hinv")
    w = MultiPoly.var(F, "w")
    t = RatFunc.t(F)
    dmin = [MultiPoly.const(F, c) for c in ts.delta_min()]
    bmin = [c if isinstance(c, MultiPoly) else MultiPoly.const(F, c) for c in ts.beta_min(hinv)]
    alg = TowerAlgebra(F, [dmin, bmin])
    basis = alg.basis()
    one = MultiPoly.const(F, 1)
    coords = {}
    unknowns = ["w", "hinv"]
    for i in range(q):
        elem = {}
        for (r, s) in basis:
            name = coord_name(i, r, s)
            unknowns.append(name)
            elem[(r, s)] = MultiPoly.var(F, name)
        coords[nf.names[i]] = elem
    # the symbolic algebra needs MultiPoly coefficients throughout
    alg.zero = MultiPoly.zero(F)
    alg._pow_tables = [_powers_symbolic(alg, k, one) for k in range(2)]
    norm = alg.eval_poly(nf.P, coords)
    tq = MultiPoly.const(F, t**q)
    rhs = MultiPoly.const(F, t ** (q - 1)) * w**q + 1
    eqs = [Equation.leaf(hinv * rhs - tq)]
    for (r, s) in basis:
        coord = norm.get((r, s), MultiPoly.zero(F)) * tq
        if (r, s) == (0, 0):
            coord = coord - rhs
        eqs.append(Equation.leaf(coord))
    meta = {
        "template": "int_definition",
        "params": {
            "tower": ts.to_json(),
            "basis": [f"delta^{r}*beta^{s}" for r, s in basis],
            "coordinates": [[coord_name(i, r, s) for (r, s) in basis] for i in range(q)],
            "norm_form": str(nf.P),
        },
    }
    return EquationSystem(F, unknowns, eqs, meta)


def _powers_symbolic(alg: TowerAlgebra, k: int, one: MultiPoly) -> list[list]:
    d = alg.degs[k]
    rel = alg.rels[k]
    zero = MultiPoly.zero(alg.F)
    table = []
    vec = [one] + [zero] * (d - 1)
    for _ in range(2 * d - 1):
        table.append(vec)
        over = vec[-1]
        vec = [zero] + vec[:-1]
        if not over.is_zero():
            vec = [v + over * r for v, r in zip(vec, rel)]
    return table


_INT_CACHE: dict[tuple, EquationSystem] = {}


def int_system(ts: TowerSpec) -> EquationSystem:
    key = (ts.q, ts.field.p, ts.field.k, ts.a)
    if key not in _INT_CACHE:
        _INT_CACHE[key] = gen_int_definition(ts)
    return _INT_CACHE[key]


def coordinate_equations(w: RatFunc, ts: TowerSpec) -> tuple[list[str], list[MultiPoly]]:
    """The INT system with w (and 1/h_w) substituted: equations in the coordinates only."""
    sys = int_system(ts)
    h = compute_h(w, ts.q)
    vals = {"w": w, "hinv": h.inverse()}
    names = [u for u in sys.unknowns if u not in vals]
    eqs = [eq.poly.substitute(vals) for eq in sys.equations[1:]]
    return names, eqs


# -- t-adic sieve -------------------------------------------------------------

def _laurent(x: RatFunc, prec: int) -> tuple[int, list[int]]:
    """(valuation v, coefficients c_0..c_{prec-1}) with x = t^v * sum c_i t^i."""
    F = x.F
    n, d = list(x.num), list(x.den)
    vn = next(i for i, c in enumerate(n) if c)
    vd = next(i for i, c in enumerate(d) if c)
    n, d = n[vn:], d[vd:]
    inv0 = F.inv(d[0])
    out = []
    rem = n + [0] * prec
    for i in range(prec):
        c = F.mul(rem[i], inv0) if i < len(rem) else 0
        out.append(c)
        if c:
            for j, dj in enumerate(d):
                if i + j < len(rem):
                    rem[i + j] = F.sub(rem[i + j], F.mul(c, dj))
    return vn - vd, out


@dataclass
class SieveResult:
    refuted: bool
    levels: int
    states: int
    reason: str


def t_adic_sieve(F: GF, names: list[str], eqs: list[MultiPoly], bound: int,
                 max_levels: int = 4, max_rows: int = 400_000) -> SieveResult:
    """Decide whether the equations have a solution with every unknown of t-adic order >= -bound.

    Digits of every unknown are fixed one t-adic level at a time; after each
    level the equation coefficients that no longer depend on unfixed digits
    must vanish.  A refutation is exact: no tuple with all orders >= -bound
    (in particular no tuple of heights <= bound) solves the system.
    """
    q = F.q
    ADD = np.array([[F.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
    MUL = np.array([[F.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
    n = len(names)
    idx = {nm: i for i, nm in enumerate(names)}
    prec = max_levels + 2
    # term data per equation: (valuation of coefficient, coefficient series, monomial, degree)
    eq_terms = []
    mu = None
    consts = []
    for eq in eqs:
        terms = []
        const_series = None
        for mono, c in eq.terms.items():
            v, ser = _laurent(c, prec + 4 * bound * 3 + 8)
            dM = sum(e for _, e in mono)
            if dM == 0:
                const_series = (v, ser)
                continue
            terms.append((v, ser, [(idx[nm], e) for nm, e in mono], dM))
            lo = v - bound * dM
            mu = lo if mu is None else min(mu, lo)
        eq_terms.append(terms)
        consts.append(const_series)
    if mu is None:
        refuted = any(c is not None for c in consts)
        return SieveResult(refuted, 0, 0, "constant equations")

    def const_coeff(cs, m):
        if cs is None:
            return 0
        v, ser = cs
        i = m - v
        return ser[i] if 0 <= i < len(ser) else 0

    # exponents below mu involve constants only
    for cs in consts:
        if cs is not None and cs[0] < mu:
            return SieveResult(True, 0, 1, f"constant term of order {cs[0]} below reachable order {mu}")

    def series_mul(a, b, length):
        out = np.zeros((a.shape[0], length), dtype=np.int64)
        for i in range(min(length, a.shape[1])):
            for j in range(min(length - i, b.shape[1])):
                out[:, i + j] = ADD[out[:, i + j], MUL[a[:, i], b[:, j]]]
        return out

    states = np.zeros((1, n, 0), dtype=np.int64)
    digit_vectors = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    for L in range(1, max_levels + 1):
        S = states.shape[0]
        if S * len(digit_vectors) > max_rows:
            return SieveResult(False, L - 1, S, "row budget exceeded")
        cand = np.concatenate(
            [np.repeat(states, len(digit_vectors), axis=0),
             np.tile(digit_vectors, (S, 1))[:, :, None]], axis=2)
        m = mu + L - 1
        alive = np.ones(cand.shape[0], dtype=bool)
        for terms, cs in zip(eq_terms, consts):
            total = np.full(cand.shape[0], const_coeff(cs, m), dtype=np.int64)
            pow_cache: dict = {}
            for v, ser, mono, dM in terms:
                top = m - (v - bound * dM)  # highest digit-series index needed
                if top < 0:
                    continue
                length = top + 1
                prod = None
                for k, e in mono:
                    key = (k, e, length)
                    if key not in pow_cache:
                        base = cand[:, k, :length]
                        if base.shape[1] < length:
                            base = np.pad(base, ((0, 0), (0, length - base.shape[1])))
                        pw = base
                        for _ in range(e - 1):
                            pw = series_mul(pw, base, length)
                        pow_cache[key] = pw
                    prod = pow_cache[key] if prod is None else series_mul(prod, pow_cache[key], length)
                # coefficient of t^m in c * t^(-bound*dM) * prod
                acc = np.zeros(cand.shape[0], dtype=np.int64)
                for i in range(length):
                    ci = top - i
                    if 0 <= ci < len(ser) and ser[ci]:
                        acc = ADD[acc, MUL[prod[:, i], ser[ci]]]
                total = ADD[total, acc]
            alive &= total == 0
        states = cand[alive]
        if states.shape[0] == 0:
            return SieveResult(True, L, S, f"no digit prefix survives t-adic level {L} (order {m})")
    return SieveResult(False, max_levels, int(states.shape[0]), "level budget exhausted")


# -- bounded search ------------------------------------------------------------

@dataclass
class NormSearchReport:
    witness: dict | None
    bound: int
    method: str
    detail: str

    def to_json(self) -> dict:
        return {
            "found": self.witness is not None,
            "bound": self.bound,
            "method": self.method,
            "detail": self.detail,
            "witness": None if self.witness is None else {k: str(v) for k, v in self.witness.items()},
        }


def _sparse_search(names: list[str], eqs: list[MultiPoly], values: Sequence[RatFunc], limit: int):
    """First tuple (support size, support, values order) solving every equation.

    Returns (assignment or None, candidates examined, exhausted flag).  Only
    terms inside the current support are evaluated, and the last coordinate
    of the support is solved for instead of enumerated whenever the equations
    pin it down linearly.
    """
    n = len(names)
    idx = {nm: i for i, nm in enumerate(names)}
    compiled = [[(c, [(idx[v], e) for v, e in mono]) for mono, c in eq.terms.items()] for eq in eqs]
    allowed = set(values)
    examined = 0

    def univariate(live, vals, last):
        """Each equation as {degree in the last coordinate: coefficient}."""
        out = []
        for terms in live:
            coeffs: dict[int, RatFunc] = {}
            for c, mono in terms:
                term, d = c, 0
                for i, e in mono:
                    if i == last:
                        d = e
                    else:
                        term = term * (vals[i] if e == 1 else vals[i] ** e)
                coeffs[d] = coeffs[d] + term if d in coeffs else term
            out.append({d: c for d, c in coeffs.items() if not c.is_zero()})
        return out

    def holds(polys, y):
        for poly in polys:
            acc = None
            for d, c in poly.items():
                term = c * y**d if d else c
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                return False
        return True

    def candidates(polys):
        """Values of the last coordinate worth testing, in canonical order."""
        if any(set(poly) == {0} for poly in polys):
            return []
        linear = next((poly for poly in polys if poly and max(poly) == 1), None)
        if linear is None:
            quads = [poly for poly in polys if poly and max(poly) == 2]
            for p1, p2 in itertools.combinations(quads, 2):
                lin = {d: p1.get(d, 0) * p2[2] - p2.get(d, 0) * p1[2] for d in (0, 1)}
                lin = {d: c for d, c in lin.items() if not (isinstance(c, int) or c.is_zero())}
                if 1 in lin:
                    linear = lin
                    break
        if linear is not None:
            y = -linear.get(0, RatFunc.const(values[0].F, 0)) / linear[1]
            return [y] if y in allowed else []
        return values

    for k in range(n + 1):
        for support in itertools.combinations(range(n), k):
            sup = set(support)
            live = [[(c, mono) for c, mono in terms if all(i in sup for i, _ in mono)] for terms in compiled]
            if k == 0:
                examined += 1
                if all(not terms for terms in live):
                    return {}, examined, True
                continue
            last = support[-1]
            for combo in itertools.product(values, repeat=k - 1):
                if examined >= limit:
                    return None, examined, False
                examined += 1
                vals = dict(zip(support, combo))
                polys = univariate(live, vals, last)
                for y in candidates(polys):
                    if holds(polys, y):
                        vals[last] = y
                        return vals, examined, True
    return None, examined, True


def norm_search(w: RatFunc, ts: TowerSpec, bound: int, enumerate_limit: int = 20_000) -> NormSearchReport:
    """t-adic sieve first (exact refutation), then enumeration in sparse canonical order:
    coordinate tuples by number of nonzero entries, then support, then values."""
    names, eqs = coordinate_equations(w, ts)
    F = ts.field
    sieve = t_adic_sieve(F, names, eqs, bound)
    if sieve.refuted:
        return NormSearchReport(None, bound, "t-adic sieve", f"not found <= {bound}: {sieve.reason}")
    from .solver import enumerate_ratfuncs

    zero = RatFunc.const(F, 0)
    values = [v for v in enumerate_ratfuncs(F, bound) if not v.is_zero()]
    found, examined, exhausted = _sparse_search(names, eqs, values, enumerate_limit)
    if found is None:
        tail = "exhausted" if exhausted else f"stopped after {examined} candidates"
        return NormSearchReport(None, bound, "enumeration", f"not found <= {bound} ({tail})")
    asg = {nm: found.get(i, zero) for i, nm in enumerate(names)}
    asg["w"] = w
    asg["hinv"] = compute_h(w, ts.q).inverse()
    return NormSearchReport(asg, bound, "enumeration", f"witness after {examined} candidates")


def check_norm_solvable_bruteforce(w: RatFunc, ts: TowerSpec, bound: int) -> dict | None:
    """First witness with coordinate heights <= bound, or None ("not found <= bound")."""
    return norm_search(w, ts, bound).witness


# -- constructive witnesses via the constant extension ----------------------

class _ConstExt:
    """F' = F(alpha) for a prime field F, realised as gf(p, q) with modulus alpha's polynomial."""

    def __init__(self, ts: TowerSpec):
        F = ts.field
        if F.k != 1:
            raise IntegralityError("constructive witnesses need a prime constant field")
        mod = tuple(c.const_value() for c in ts.alpha_min())
        self.E = gf(F.p, ts.q, mod)
        self.F = F
        self.q = ts.q

    def coords(self, x: int) -> list[int]:
        p = self.F.p
        return [(x // p**i) % p for i in range(self.q)]

    def norm_const(self, x: int) -> int:
        E = self.E
        return E.pow(x, (E.q - 1) // (self.F.q - 1))


def _norm_preimage(ts: TowerSpec, target: RatFunc):
    """z in F'(t) with N_{F'(t)/F(t)}(z) = target, or None when target is not a norm."""
    ext = _ConstExt(ts)
    E, F, q = ext.E, ext.F, ts.q
    parts = []
    lead = F.mul(target.num[-1], F.inv(target.den[-1]))
    for poly_, sign in ((target.num, 1), (target.den, -1)):
        for f, m in P.factor(F, poly_)[1]:
            parts.append((f, sign * m))
    z_num, z_den = P.ONE, P.ONE
    for f, m in parts:
        d = len(f) - 1
        if d % q:
            if m % q:
                return None
            piece, e = f, m // q
        else:
            facs = P.factor(E, f)[1]
            piece, e = facs[0][0], m  # f splits into q conjugates over F'
        if e > 0:
            z_num = P.mul(E, z_num, P.pow_(E, piece, e))
        elif e < 0:
            z_den = P.mul(E, z_den, P.pow_(E, piece, -e))
    gamma = next((x for x in range(1, E.q) if ext.norm_const(x) == lead), None)
    if gamma is None:  # pragma: no cover - the norm on finite fields is onto
        return None
    return ext, P.scale(E, z_num, gamma), z_den


def _split_coords(ext: _ConstExt, num: P.Poly, den: P.Poly) -> list[RatFunc]:
    """Coordinates over F(t) on 1, alpha, ..., alpha^{q-1} of num/den in F'(t)."""
    E, F, q = ext.E, ext.F, ext.q
    # make the denominator F-rational by multiplying with its conjugates
    conj_prod = P.ONE
    d = den
    for _ in range(q - 1):
        d = tuple(E.pow(c, F.q) for c in d)
        conj_prod = P.mul(E, conj_prod, d)
    num = P.mul(E, num, conj_prod)
    den = P.mul(E, den, conj_prod)
    if any(ext.coords(c)[1:] != [0] * (q - 1) for c in den):
        raise AssertionError("norm of the denominator is not F-rational")  # pragma: no cover
    den_f = tuple(ext.coords(c)[0] for c in den)
    out = []
    for i in range(q):
        ni = P.trim(ext.coords(c)[i] for c in num)
        out.append(RatFunc(F, ni, den_f))
    return out


def _delta_substitution(ts: TowerSpec) -> P.Poly:
    """t as a polynomial in delta: delta^q - 1 (Kummer) or delta - delta^p (Artin-Schreier)."""
    F, q = ts.field, ts.q
    if ts.branch == "q!=p":
        return P.trim([F.neg(1)] + [0] * (q - 1) + [1])
    return P.trim([0, 1] + [0] * (q - 2) + [F.neg(1)])


def _in_delta(x: RatFunc, phi: P.Poly) -> RatFunc:
    F = x.F
    return RatFunc(F, P.compose(F, x.num, phi), P.compose(F, x.den, phi))


def construct_int_witness(w: RatFunc, ts: TowerSpec) -> dict | None:
    """Exact assignment for gen_int_definition(ts) with the given w, or None.

    Norms from a constant extension of a rational function field are decided by
    factoring: every irreducible factor of degree prime to q needs multiplicity
    divisible by q.  Two rational fields are tried, K = F(t) and K(delta) =
    F(delta).  The target h_w is first twisted by norms of explicit elements
    gamma1, gamma2 of L(alpha):
      Kummer: gamma1 = delta (norm t + 1), gamma2 = beta (norm 1/h_w + 1);
      Artin-Schreier: gamma1 = delta - alpha (norm a - t),
                      gamma2 = beta - alpha (norm 1/h_w + a).
    If h_w * G1^e1 * G2^e2 = N(z) then x = z * gamma1^-e1 * gamma2^-e2 has norm h_w.
    """
    F, q = ts.field, ts.q
    if F.k != 1:
        return None
    if pole_obstruction_at_zero_of_t(w, q):
        return None
    t = RatFunc.t(F)
    h = compute_h(w, q)
    hinv = h.inverse()
    a = RatFunc.const(F, ts.a)
    kummer = ts.branch == "q!=p"
    G1 = t + 1 if kummer else a - t
    G2 = hinv + 1 if kummer else hinv + a
    if G2.is_zero():
        return None
    alg = TowerAlgebra(F, [ts.delta_min(), ts.beta_min(hinv), ts.alpha_min()])
    delta, beta, alpha = alg.gen(0), alg.gen(1), alg.gen(2)
    one = RatFunc.const(F, 1)
    gam1 = delta if kummer else alg.add(delta, alg.neg(alpha))
    gam2 = beta if kummer else alg.add(beta, alg.neg(alpha))

    def shifted(x: dict, k: int, j: int) -> dict:
        """Image of x under the automorphism moving generator k to its j-th conjugate."""
        out: dict = {}
        for e, c in x.items():
            if kummer:
                term = {e: c * F.pow(ts.xi, j * e[k])}
            else:
                gen_shift = alg.add(alg.gen(k), alg.const(RatFunc.const(F, j % F.p)))
                rest = list(e)
                rest[k] = 0
                term = alg.mul({tuple(rest): c}, alg.pow(gen_shift, e[k]))
            out = alg.add(out, term)
        return out

    def inverse(g: dict, k: int) -> dict:
        acc = alg.const(one)
        for j in range(1, q):
            acc = alg.mul(acc, shifted(g, k, j))
        norm = alg.mul(acc, g)
        if set(norm) != {(0, 0, 0)}:  # pragma: no cover - a norm lies in K
            raise AssertionError("conjugate product left the base field")
        return alg.scale(acc, norm[(0, 0, 0)].inverse())

    def poly_at(f: P.Poly, x: dict) -> dict:
        acc: dict = {}
        pw = alg.const(one)
        for c in f:
            if c:
                acc = alg.add(acc, alg.scale(pw, RatFunc.const(F, c)))
            pw = alg.mul(pw, x)
        return acc

    def from_delta(r: RatFunc) -> dict:
        num = poly_at(r.num, delta)
        return alg.mul(num, inverse(poly_at(r.den, delta), 0))

    phi = _delta_substitution(ts)
    # gamma1, gamma2 move with alpha (Artin-Schreier) or with delta, beta (Kummer)
    inv1 = inverse(gam1, 0 if kummer else 2)
    inv2 = inverse(gam2, 1 if kummer else 2)

    attempts = [(False, e1, e2) for e2 in range(q) for e1 in range(q)]
    attempts += [(True, 0, e2) for e2 in range(q)]
    for over_delta, e1, e2 in attempts:
        target = h * G1**e1 * G2**e2
        if over_delta:
            target = _in_delta(target, phi)
        found = _norm_preimage(ts, target)
        if found is None:
            continue
        ext, zn, zd = found
        x: dict = {}
        for i, c in enumerate(_split_coords(ext, zn, zd)):
            if c.is_zero():
                continue
            piece = from_delta(c) if over_delta else alg.const(c)
            x = alg.add(x, alg.mul(piece, alg.pow(alpha, i)))
        for _ in range(e1):
            x = alg.mul(x, inv1)
        for _ in range(e2):
            x = alg.mul(x, inv2)
        asg = {"w": w, "hinv": hinv}
        zero = RatFunc.const(F, 0)
        for i in range(q):
            for r in range(q):
                for s in range(q):
                    asg[coord_name(i, r, s)] = x.get((r, s, i), zero)
        if verify_assignment(int_system(ts), asg).ok:
            return asg
    return None


def int_membership_witness(w: RatFunc, ts: TowerSpec, search_bound: int = 0) -> tuple[dict | None, str]:
    """Constructive witness first, bounded search as fallback."""
    asg = construct_int_witness(w, ts)
    if asg is not None:
        return asg, "constructed"
    rep = norm_search(w, ts, search_bound, enumerate_limit=200_000)
    return rep.witness, rep.method if rep.witness else rep.detail


def verify_int(w: RatFunc, ts: TowerSpec, asg: dict) -> Verdict:
    return verify_assignment(int_system(ts), asg)
