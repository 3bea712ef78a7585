"""Exact witnesses for the generated systems and an exact verifier."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .ratfunc import RatFunc, parse_ratfunc
from .system import OK, SPURIOUS, EquationSystem
from .templates import ConstantSet, d_names, mu_name, pair_unknowns

Assignment = dict  # unknown name -> RatFunc


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Satisfied", "Violated" or "SpuriousDenominator"
    equation: int | None = None
    path: tuple = ()
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.kind == "Satisfied"

    def to_json(self) -> dict:
        if self.ok:
            return {"verdict": "Satisfied"}
        out = {"verdict": self.kind, "equation": self.equation, "path": list(self.path)}
        if self.detail:
            out["detail"] = self.detail
        return out


SATISFIED = Verdict("Satisfied")


def artin_schreier_witness(x: RatFunc, pa: int, s: int) -> RatFunc:
    """v = x^(pa^(s-1)) + ... + x^pa + x, so that v^pa - v = x^(pa^s) - x."""
    if pa < 2:
        raise ValueError("the Artin-Schreier step must be at least 2")
    v = RatFunc.const(x.F, 0)
    term = x
    for _ in range(s):
        v = v + term
        term = term**pa
    return v


def verify_assignment(sys: EquationSystem, asg: Mapping[str, RatFunc]) -> Verdict:
    missing = [u for u in sys.unknowns if u not in asg]
    if missing:
        raise WitnessError(f"assignment misses unknowns {missing[:5]}")
    extra = [u for u in asg if u not in set(sys.unknowns)]
    if extra:
        raise WitnessError(f"assignment has undeclared unknowns {extra[:5]}")
    for i, eq in enumerate(sys.equations):
        status, path = eq.status(asg)
        if status == OK:
            continue
        if status == SPURIOUS:
            leaf = eq
            for k in path:
                leaf = leaf.children[k]
            zero = next(d for d in leaf.dens if d.evaluate(asg).is_zero())
            return Verdict("SpuriousDenominator", i, path, f"cleared denominator {zero} vanishes")
        return Verdict("Violated", i, path)
    return SATISFIED


def assignment_to_json(asg: Mapping[str, RatFunc]) -> dict[str, str]:
    return {k: str(v) for k, v in asg.items()}


def assignment_from_json(F, data: Mapping[str, str]) -> Assignment:
    return {k: parse_ratfunc(F, v) for k, v in data.items()}


def _zeros(sys: EquationSystem) -> Assignment:
    zero = RatFunc.const(sys.field, 0)
    return {u: zero for u in sys.unknowns}


def _constant_set_of(sys: EquationSystem, cs: ConstantSet) -> ConstantSet:
    n = sys.meta.get("params", {}).get("clamp", len(cs))
    return cs.subset(n)


# -- P(K) power of t -------------------------------------------------------

def build_pk_power_witness(p: int, s: int, cs: ConstantSet, sys: EquationSystem) -> Assignment:
    params = sys.meta.get("params", {})
    if sys.meta.get("template") != "pk_power_of_t" or params.get("p") != p:
        raise WitnessError("system was not generated by gen_pk_power_of_t_system for this p")
    F = sys.field
    a = params["a"]
    pa = p**a
    cs = _constant_set_of(sys, cs)
    t = RatFunc.t(F)
    asg = _zeros(sys)
    asg["w"] = t ** (pa**s)
    asg["v"] = artin_schreier_witness(t, pa, s)
    asg["u"] = artin_schreier_witness(t.inverse(), pa, s)
    for i, j in params["pairs"]:
        m, n = (a * s) % cs.r[i], (a * s) % cs.r[j]
        F_ = cs.field
        if cs.d(i, m) != F_.pow(cs.elements[i], p ** (a * s)) or cs.d(j, n) != F_.pow(cs.elements[j], p ** (a * s)):
            raise WitnessError(f"orbit of c_{i} or c_{j} cannot realize the shift")  # pragma: no cover
        ci, cj = RatFunc.const(F, cs.elements[i]), RatFunc.const(F, cs.elements[j])
        X = (t - ci) / (t - cj)
        un, vn = pair_unknowns(i, j, m, n)
        asg[un] = artin_schreier_witness(X, pa, s)
        asg[vn] = artin_schreier_witness(X.inverse(), pa, s)
    return asg


# -- D system -----------------------------------------------------------

def build_d_system_witness(u: RatFunc, p: int, a: int, s: int, cs: ConstantSet, sys: EquationSystem) -> Assignment:
    if sys.meta.get("template") != "d_system":
        raise WitnessError("system was not generated by gen_d_system")
    F = sys.field
    if u.is_zero():
        raise WitnessError("u = 0 makes u^-1 undefined")
    for l, c in enumerate(cs.elements):
        for b in cs.orbits[l]:
            if (u + RatFunc.const(F, b)).is_zero():
                raise WitnessError(f"u + {F.element_str(b)} vanishes identically (shift of c_{l})")
    pa, pas = p**a, p ** (a * s)
    t = RatFunc.t(F)
    v = u**pas
    asg = _zeros(sys)
    asg.update(u=u, v=v, lam1=artin_schreier_witness(u, pa, s), lamm1=artin_schreier_witness(u.inverse(), pa, s))
    n = len(cs)
    shift = a * s
    for i in range(n):
        ji = shift % cs.r[i]
        for l in range(n):
            if l == i:
                continue
            jl = shift % cs.r[l]
            ci, cl = RatFunc.const(F, cs.elements[i]), RatFunc.const(F, cs.elements[l])
            uil = (u + ci) / (u + cl)
            asg[f"u_{i}_{l}"] = uil
            names = d_names(i, ji, l, jl)
            vx = (v + RatFunc.const(F, cs.d(i, ji))) / (v + RatFunc.const(F, cs.d(l, jl)))
            asg[names["v"]] = vx
            asg[names["sigma"]] = artin_schreier_witness(uil, pa, s)
            for m in (0, 1):
                for z in (-1, 1):
                    X = uil ** (2 * z) * t**m
                    asg[mu_name(i, ji, l, jl, z, m)] = X if s > 0 else RatFunc.const(F, 0)
    return asg


# -- E / E2 systems ---------------------------------------------------------

def _e_values(x: RatFunc, p: int, s: int) -> dict[str, RatFunc]:
    F = x.F
    t = RatFunc.t(F)
    xp = x**p
    if (xp - t).is_zero() or (xp - t.inverse()).is_zero():
        raise WitnessError("x^p = t^(+-1): the defining fraction has a vanishing denominator")
    u = (xp + t) / (xp - t)
    ut = (xp + t.inverse()) / (xp - t.inverse())
    return {"u": u, "ut": ut, "v": u ** (p**s), "vt": ut ** (p**s), "x": x, "y": x ** (p**s)}


def _e2_values(x: RatFunc, s: int) -> dict[str, RatFunc]:
    F = x.F
    if F.p != 2:
        raise WitnessError("the E2 witness needs characteristic 2")
    t = RatFunc.t(F)
    x2 = x**2
    u = (x2 + t**2 + t) / (x2 + t)
    ti = t.inverse()
    ut = (x2 + ti**2 + ti) / (x2 + ti)
    return {"u": u, "ut": ut, "v": u ** (2**s), "vt": ut ** (2**s), "x": x, "y": x ** (2**s)}


def build_e_witness(x: RatFunc, p: int, s: int) -> Assignment:
    """Witness for the full pair system with y = x^(p^s)."""
    if x.F.p != p:
        raise WitnessError("field characteristic mismatch")
    if p == 2:
        return _e2_values(x, s)
    asg = _e_values(x, p, s)
    shifted = _e_values(x + 1, p, s)
    for k in ("u", "ut", "v", "vt"):
        asg[f"{k}1"] = shifted[k]
    return asg


def build_e_single_witness(x: RatFunc, p: int, s: int) -> Assignment:
    """Witness for a single E (or E2) system."""
    return _e2_values(x, s) if p == 2 else _e_values(x, p, s)


# -- constants subfield ------------------------------------------------------

def lies_in_constant_subfield(asg: Mapping[str, RatFunc], cs: ConstantSet) -> bool:
    """Coefficients of every value lie in F_p(C(F)), the field generated by the constants."""
    F = cs.field
    d = 1
    for r in cs.r:
        d = d * r // math.gcd(d, r)
    e = F.p**d
    for val in asg.values():
        for c in val.num + val.den:
            if F.pow(c, e) != c:
                return False
    return True
