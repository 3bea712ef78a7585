"""Constants, admissible constant sets and the generated equation systems.

Every generator returns an `EquationSystem` whose equations have been
multiplied through by their denominators; the multipliers are kept on the
leaves so a verifier can reject assignments that make them vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .fields import GF, FqElement, gf, is_prime
from .multipoly import MultiPoly
from .places import Place, ord_at
from .ratfunc import RatFunc
from .system import Equation, EquationSystem, combine_to_single  # noqa: F401  (re-export)


class TemplateError(ValueError):
    pass


class EnlargeK(TemplateError):
    def __init__(self, msg: str, suggested_k: int | None):
        super().__init__(msg)
        self.suggested_k = suggested_k


# -- constants ----------------------------------------------------------

@dataclass(frozen=True)
class ConstantsRecord:
    p: int
    a: int
    C: int
    g: int
    k: int
    H_omega: int
    e: int
    C1: Fraction
    C2: Fraction
    C3: Fraction
    C4: Fraction
    C5: Fraction

    def to_json(self) -> dict:
        def enc(x):
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return {
            "p": self.p, "a": self.a, "C": self.C, "g": self.g, "k": self.k,
            "H_omega": self.H_omega, "e": self.e,
            "C1": enc(self.C1), "C2": enc(self.C2), "C3": enc(self.C3),
            "C4": enc(self.C4), "C5": enc(self.C5),
        }


def compute_constants(p: int, C: int = 1) -> ConstantsRecord:
    if not is_prime(p):
        raise TemplateError(f"{p} is not prime")
    if C < 1:
        raise TemplateError("C must be at least 1")
    g, k, H_omega, e = 0, 1, 0, 0
    a = 2 if p == 2 else 1
    pa = p**a
    C1 = Fraction(2 * g - 2 + (pa + 1) * (C + g + 1))
    C2 = Fraction(2 * g - 1 + (pa + 1) * (C + g + 1), pa - 1)
    C3 = C + pa * C1 * C2
    C4 = math.factorial(k) * k**k * H_omega * C3
    C5 = C4 + 2 * e + 2 * k + 4 * C + 2
    return ConstantsRecord(p, a, C, g, k, H_omega, e, C1, C2, C3, Fraction(C4), Fraction(C5))


# -- constant sets ------------------------------------------------------

@dataclass(frozen=True)
class ConstantSet:
    field: GF
    elements: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]
    exp_bound: int

    @property
    def r(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.orbits)

    def d(self, i: int, j: int) -> int:
        """c_i raised to p^j."""
        orb = self.orbits[i]
        return orb[j % len(orb)]

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, i: int) -> FqElement:
        return FqElement(self.field, self.elements[i])

    def subset(self, n: int) -> "ConstantSet":
        return ConstantSet(self.field, self.elements[:n], self.orbits[:n], self.exp_bound)

    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.spec(),
            "elements": [F.element_str(c) for c in self.elements],
            "orders": [F.order(c) for c in self.elements],
            "orbits": [[F.element_str(x) for x in o] for o in self.orbits],
            "r": list(self.r),
            "expBound": self.exp_bound,
        }


def frobenius_orbit(F: GF, c: int) -> tuple[int, ...]:
    orb = [c]
    x = F.pow(c, F.p)
    while x != c:
        orb.append(x)
        x = F.pow(x, F.p)
    return tuple(orb)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _coprime_orders(n: int, count: int, exp_bound: int) -> tuple[int, ...] | None:
    cands = [d for d in _divisors(n) if d > exp_bound]
    for combo in combinations(cands, count):
        if all(math.gcd(x, y) == 1 for x, y in combinations(combo, 2)):
            return combo
    return None


def make_constant_set(F: GF, elements, exp_bound: int = 0) -> ConstantSet:
    elements = tuple(elements)
    if len(set(elements)) != len(elements) or 0 in elements:
        raise TemplateError("constants must be distinct and nonzero")
    return ConstantSet(F, elements, tuple(frobenius_orbit(F, c) for c in elements), exp_bound)


def build_constant_set(F: GF, count: int, exp_bound: int) -> ConstantSet:
    """Elements of pairwise coprime multiplicative orders, each order above exp_bound."""
    if count < 1:
        raise TemplateError("count must be at least 1")
    orders = _coprime_orders(F.q - 1, count, exp_bound)
    if orders is None:
        k2 = F.k + 1
        while k2 <= F.k + 24 and _coprime_orders(F.p**k2 - 1, count, exp_bound) is None:
            k2 += 1
        hint = k2 if k2 <= F.k + 24 else None
        raise EnlargeK(
            f"F_{F.q} has no {count} elements of pairwise coprime orders > {exp_bound}; "
            f"enlarge k (smallest sufficient k found: {hint})",
            hint,
        )
    elements = []
    for o in orders:
        elements.append(next(x for x in range(1, F.q) if F.order(x) == o))
    cs = make_constant_set(F, elements, exp_bound)
    if not independence_holds(cs):  # pragma: no cover - guaranteed by coprime orders
        raise TemplateError("independence check failed")
    return cs


def independence_holds(cs: ConstantSet) -> bool:
    """Exhaustive check that c_i^n != c_j^m for i != j and 0 < |n|, |m| <= expBound."""
    F, E = cs.field, cs.exp_bound
    exps = [n for n in range(-E, E + 1) if n]
    powers = [{F.pow(c, n) for n in exps} for c in cs.elements]
    for i, j in combinations(range(len(cs.elements)), 2):
        if powers[i] & powers[j]:
            return False
    return True


def admissible_constants(z: RatFunc, cs: ConstantSet, excluded) -> list[int]:
    """Indices i such that z - c_i^(p^j) has no zero at an excluded place, for every j."""
    if z.is_const():
        raise TemplateError("z must be nonconstant")
    F = cs.field
    kept = []
    for i, orb in enumerate(cs.orbits):
        ok = True
        for b in orb:
            diff = z - RatFunc.const(F, b)
            if any(ord_at(diff, pl) > 0 for pl in excluded):
                ok = False
                break
        if ok:
            kept.append(i)
    return kept


# -- helpers for building equations -----------------------------------

class _Builder:
    def __init__(self, F: GF):
        self.F = F
        self.t = MultiPoly.const(F, RatFunc.t(F))

    def v(self, name: str) -> MultiPoly:
        return MultiPoly.var(self.F, name)

    def c(self, value) -> MultiPoly:
        if isinstance(value, RatFunc):
            return MultiPoly.const(self.F, value)
        return MultiPoly.const(self.F, RatFunc.const(self.F, value))

    def tp(self, n: int) -> MultiPoly:
        return MultiPoly.const(self.F, RatFunc.tpow(self.F, n))

    def as_op(self, x: MultiPoly, pa: int) -> MultiPoly:
        """x^pa - x."""
        return x**pa - x


def _field_for(cs: ConstantSet | None, p: int) -> GF:
    if cs is None:
        return gf(p)
    if cs.field.p != p:
        raise TemplateError("constant set lives in a different characteristic")
    return cs.field


# -- P(K)-power-of-t system --------------------------------------------

def base_pair_equations(F: GF, pa: int) -> list[Equation]:
    b = _Builder(F)
    w, u, v, t = b.v("w"), b.v("u"), b.v("v"), b.t
    eq_v = Equation.leaf(w - t - v**pa + v)
    eq_u = Equation.leaf(t - w - w * t * b.as_op(u, pa), [w])
    return [eq_v, eq_u]


def pair_equations(F: GF, pa: int, bb: int, bb2: int, ci: int, cj: int, uname: str, vname: str) -> Equation:
    """Both equations of the shifted pair for one choice (b, b'), combined by fold."""
    b = _Builder(F)
    w, t = b.v("w"), b.t
    wb, wb2 = w - b.c(bb), w - b.c(bb2)
    ti, tj = t - b.c(ci), t - b.c(cj)
    u, v = b.v(uname), b.v(vname)
    # (w-b)/(w-b') - (t-ci)/(t-cj) = u^pa - u, times (w-b')(t-cj)
    e1 = Equation.leaf(wb * tj - ti * wb2 - wb2 * tj * b.as_op(u, pa), [wb2])
    # (w-b')/(w-b) - (t-cj)/(t-ci) = v^pa - v, times (w-b)(t-ci)
    e2 = Equation.leaf(wb2 * ti - tj * wb - wb * ti * b.as_op(v, pa), [wb])
    return Equation.fold([e1, e2])


def pair_unknowns(i: int, j: int, m: int, n: int) -> tuple[str, str]:
    return f"u_{i}_{j}_{m}_{n}", f"v_{i}_{j}_{m}_{n}"


def gen_pk_power_of_t_system(p: int, cs: ConstantSet, consts: ConstantsRecord, clamp: int | None = None) -> EquationSystem:
    if len(cs) == 0:
        raise TemplateError("empty constant set")
    F = _field_for(cs, p)
    nominal = int(consts.C5)
    if clamp is not None:
        cs = cs.subset(min(clamp, len(cs)))
    elif len(cs) < nominal:
        raise TemplateError(f"constant set has {len(cs)} elements but C5 = {nominal}; pass a clamp")
    pa = p**consts.a
    eqs = base_pair_equations(F, pa)
    unknowns = ["w", "u", "v"]
    pairs = []
    n = len(cs)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pairs.append([i, j])
            alts = []
            for m in range(cs.r[i]):
                for k in range(cs.r[j]):
                    un, vn = pair_unknowns(i, j, m, k)
                    unknowns += [un, vn]
                    alts.append(pair_equations(F, pa, cs.d(i, m), cs.d(j, k), cs.elements[i], cs.elements[j], un, vn))
            eqs.append(Equation.prod(alts))
    meta = {
        "template": "pk_power_of_t",
        "params": {
            "p": p, "a": consts.a, "C5": nominal, "clamp": len(cs),
            "constants": [F.element_str(c) for c in cs.elements],
            "r": list(cs.r), "pairs": pairs,
        },
    }
    return EquationSystem(F, unknowns, eqs, meta)


def gen_getdown_equation(b: int, b2: int, c: int, c2: int, p: int, a: int, F: GF | None = None) -> MultiPoly:
    """(w-c')/(w-c) - (t-b')/(t-b) = u_b^(p^a) - u_b, cleared by (w-c)(t-b)."""
    if b == b2:
        raise TemplateError("b and b' must differ")
    F = F or gf(p)
    B = _Builder(F)
    w, t, u = B.v("w"), B.t, B.v("u_b")
    wc, wc2 = w - B.c(c), w - B.c(c2)
    tb, tb2 = t - B.c(b), t - B.c(b2)
    return wc2 * tb - tb2 * wc - wc * tb * B.as_op(u, p**a)


# -- D system ------------------------------------------------------------

def d_names(i: int, ji: int, l: int, jl: int) -> dict[str, str]:
    tag = f"{i}_{ji}_{l}_{jl}"
    return {"v": f"v_{tag}", "sigma": f"sigma_{tag}"}


def mu_name(i: int, ji: int, l: int, jl: int, z: int, m: int) -> str:
    zs = "p1" if z == 1 else "m1"
    return f"mu_{i}_{ji}_{l}_{jl}_{zs}_{m}"


def gen_d_system(p: int, a: int, s: int, cs: ConstantSet) -> EquationSystem:
    if len(cs) < 2:
        raise TemplateError("the D system needs at least two constants")
    F = _field_for(cs, p)
    B = _Builder(F)
    pa, pas = p**a, p ** (a * s)
    u, v = B.v("u"), B.v("v")
    n = len(cs)
    unknowns = ["u", "v", "lam1", "lamm1"]
    eqs: list[Equation] = []
    # v - u = lam1^pa - lam1 ;  v^-1 - u^-1 = lamm1^pa - lamm1 cleared by u v
    eqs.append(Equation.leaf(v - u - B.as_op(B.v("lam1"), pa)))
    eqs.append(Equation.leaf(u - v - u * v * B.as_op(B.v("lamm1"), pa), [u, v]))
    for i in range(n):
        for l in range(n):
            if l == i:
                continue
            uil = f"u_{i}_{l}"
            unknowns.append(uil)
            ci, cl = B.c(cs.elements[i]), B.c(cs.elements[l])
            eqs.append(Equation.leaf(B.v(uil) * (u + cl) - (u + ci), [u + cl]))
    for i in range(n):
        outer = []
        for ji in range(cs.r[i]):
            per_l = []
            for l in range(n):
                if l == i:
                    continue
                uil = B.v(f"u_{i}_{l}")
                inner = []
                for jl in range(cs.r[l]):
                    names = d_names(i, ji, l, jl)
                    vx, sig = B.v(names["v"]), B.v(names["sigma"])
                    unknowns += [names["v"], names["sigma"]]
                    di, dl = B.c(cs.d(i, ji)), B.c(cs.d(l, jl))
                    block = [Equation.leaf(vx * (v + dl) - (v + di), [v + dl])]
                    for m in (0, 1):
                        for z in (-1, 1):
                            mn = mu_name(i, ji, l, jl, z, m)
                            unknowns.append(mn)
                            rhs = B.as_op(B.v(mn), pas)
                            if z == 1:
                                poly = vx**2 * B.tp(m * pas) - uil**2 * B.tp(m) - rhs
                                block.append(Equation.leaf(poly))
                            else:
                                poly = uil**2 * B.tp(m * pas) - vx**2 * B.tp(m) - uil**2 * vx**2 * rhs
                                block.append(Equation.leaf(poly, [uil, vx]))
                    block.append(Equation.leaf(vx - uil - B.as_op(sig, pa)))
                    inner.append(Equation.fold(block))
                per_l.append(Equation.prod(inner))
            outer.append(Equation.fold(per_l))
        eqs.append(Equation.prod(outer))
    meta = {
        "template": "d_system",
        "params": {
            "p": p, "a": a, "s": s,
            "constants": [F.element_str(c) for c in cs.elements],
            "r": list(cs.r),
        },
    }
    return EquationSystem(F, unknowns, eqs, meta)


# -- E and E2 systems ---------------------------------------------------

E_UNKNOWNS = ["u", "ut", "v", "vt", "x", "y"]


def _e_equations(F: GF, p: int, s: int, j: int, r: int, names: dict[str, str], shift: int = 0) -> list[Equation]:
    B = _Builder(F)
    u, ut, v, vt = (B.v(names[k]) for k in ("u", "ut", "v", "vt"))
    x, y = B.v(names["x"]), B.v(names["y"])
    if shift:
        x, y = x + B.c(shift), y + B.c(shift)
    t = B.t
    ts = B.tp(p**s)
    xp, yp = x**p, y**p
    return [
        Equation.leaf(v - u ** (p**r)),
        Equation.leaf(vt - ut ** (p**j)),
        Equation.leaf(u * (xp - t) - (xp + t), [xp - t]),
        Equation.leaf(ut * (t * xp - 1) - (t * xp + 1), [t * xp - 1]),
        Equation.leaf(v * (yp - ts) - (yp + ts), [yp - ts]),
        Equation.leaf(vt * (ts * yp - 1) - (ts * yp + 1), [ts * yp - 1]),
    ]


def _e2_equations(F: GF, s: int, j: int, r: int, names: dict[str, str]) -> list[Equation]:
    B = _Builder(F)
    u, ut, v, vt = (B.v(names[k]) for k in ("u", "ut", "v", "vt"))
    x, y = B.v(names["x"]), B.v(names["y"])
    t = B.t
    t2 = B.tp(2)
    a, a2 = B.tp(2**s), B.tp(2 ** (s + 1))
    x2, y2 = x**2, y**2
    return [
        Equation.leaf(v - u ** (2**r)),
        Equation.leaf(vt - ut ** (2**j)),
        # u = (x^2 + t^2 + t)/(x^2 + t)
        Equation.leaf(u * (x2 + t) - (x2 + t2 + t), [x2 + t]),
        # ut = (x^2 + t^-2 + t^-1)/(x^2 + t^-1), times t^2
        Equation.leaf(ut * (t2 * x2 + t) - (t2 * x2 + 1 + t), [t2 * x2 + t]),
        # v = (y^2 + t^(2^(s+1)) + t^(2^s))/(y^2 + t^(2^s))
        Equation.leaf(v * (y2 + a) - (y2 + a2 + a), [y2 + a]),
        # vt: same with negative exponents, times t^(2^(s+1))
        Equation.leaf(vt * (a2 * y2 + a) - (a2 * y2 + 1 + a), [a2 * y2 + a]),
    ]


def gen_e_system(p: int, s: int, j: int | None = None, r: int | None = None, F: GF | None = None) -> EquationSystem:
    if p <= 2:
        raise TemplateError("the E system needs p > 2; use the E2 variant in characteristic 2")
    j = s if j is None else j
    r = s if r is None else r
    F = F or gf(p)
    names = {k: k for k in E_UNKNOWNS}
    eqs = _e_equations(F, p, s, j, r, names)
    return EquationSystem(F, list(E_UNKNOWNS), eqs, {"template": "e_system", "params": {"p": p, "s": s, "j": j, "r": r}})


def gen_e2_system(s: int, j: int | None = None, r: int | None = None, F: GF | None = None) -> EquationSystem:
    j = s if j is None else j
    r = s if r is None else r
    F = F or gf(2)
    if F.p != 2:
        raise TemplateError("the E2 system lives in characteristic 2")
    names = {k: k for k in E_UNKNOWNS}
    eqs = _e2_equations(F, s, j, r, names)
    return EquationSystem(F, list(E_UNKNOWNS), eqs, {"template": "e2_system", "params": {"p": 2, "s": s, "j": j, "r": r}})


SHIFTED = {"u": "u1", "ut": "ut1", "v": "v1", "vt": "vt1", "x": "x", "y": "y"}


def gen_full_pk_pair_system(p: int, s: int, F: GF | None = None) -> EquationSystem:
    """Solutions in (x, y) are exactly the pairs y = x^(p^s)."""
    F = F or gf(p)
    if F.p != p:
        raise TemplateError("field characteristic mismatch")
    if p == 2:
        sys = gen_e2_system(s, F=F)
        sys.meta = {"template": "pk_pair", "params": {"p": 2, "s": s, "variant": "E2"}}
        return sys
    names = {k: k for k in E_UNKNOWNS}
    eqs = _e_equations(F, p, s, s, s, names) + _e_equations(F, p, s, s, s, SHIFTED, shift=1)
    unknowns = list(E_UNKNOWNS) + ["u1", "ut1", "v1", "vt1"]
    return EquationSystem(F, unknowns, eqs, {"template": "pk_pair", "params": {"p": p, "s": s, "variant": "E"}})
