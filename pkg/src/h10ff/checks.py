"""Invariant suites, one per module, run by `h10ff check <suite>`."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import poly as P
from .compiler import CompileParams, parse_formula, restricted_model_check
from .fields import gf
from .integrality import (compute_h, default_tower, divisor_mod_q_profile, gen_norm_form, norm_form_from_minpoly,
                          pole_obstruction_at_zero_of_t, solve_norm_form_split)
from .multipoly import MultiPoly
from .places import (INF, Divisor, derivative, divisor_of, finite_place, local_derivation_order, ord_at,
                     riemann_roch_basis)
from .ratfunc import RatFunc
from .solver import SearchBounds, count_ratfuncs, enumerate_ratfuncs, solve_bounded
from .system import Equation, EquationSystem, parse, serialize
from .templates import build_constant_set, compute_constants, gen_e_system, gen_full_pk_pair_system, independence_holds
from .witness import artin_schreier_witness, build_e_witness, verify_assignment


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def random_ratfunc(F, rng: random.Random, max_deg: int = 3, nonzero: bool = True) -> RatFunc:
    while True:
        num = P.trim(rng.randrange(F.q) for _ in range(rng.randint(1, max_deg + 1)))
        den = P.trim(rng.randrange(F.q) for _ in range(rng.randint(1, max_deg + 1)))
        if not den or (nonzero and not num):
            continue
        return RatFunc(F, num, den)


def _suite_ff_core(rng: random.Random) -> list[CheckResult]:
    out = []
    bad = 0
    for F in (gf(2), gf(3), gf(5), gf(2, 2), gf(3, 2)):
        for _ in range(40):
            x = random_ratfunc(F, rng)
            if divisor_of(x).degree() != 0:
                bad += 1
    out.append(CheckResult("divisor degree zero", bad == 0, f"{bad} failures"))
    bad = 0
    for _ in range(60):
        F = rng.choice([gf(2), gf(3), gf(5)])
        x = random_ratfunc(F, rng)
        dx = derivative(x)
        places = list(divisor_of(x).support()) + [INF]
        for pl in dict.fromkeys(places):
            o = ord_at(x, pl)
            if dx.is_zero():
                continue
            bound = (max(0, o - 1) if o >= 0 else o - 1) - local_derivation_order(pl)
            if ord_at(dx, pl) < bound:
                bad += 1
    out.append(CheckResult("derivation inequality", bad == 0, f"{bad} failures"))
    bad = 0
    for _ in range(30):
        F = rng.choice([gf(2), gf(3)])
        pls = [INF, finite_place(F, (0, 1)), finite_place(F, (1, 1))]
        D = Divisor({pl: rng.randint(-2, 3) for pl in pls})
        basis = riemann_roch_basis(F, D)
        if len(basis) != max(0, D.degree() + 1):
            bad += 1
    out.append(CheckResult("Riemann-Roch dimension", bad == 0, f"{bad} failures"))
    return out


def _suite_templates(rng: random.Random) -> list[CheckResult]:
    out = []
    bad = []
    for p in (2, 3, 5, 7, 11, 13):
        c = compute_constants(p, 1)
        a = 1 if p > 2 else 2
        pa = p**a
        C1 = Fraction(-2 + (pa + 1) * 2)
        C2 = Fraction(-1 + (pa + 1) * 2, pa - 1)
        C3 = 1 + pa * C1 * C2
        if (c.a, c.C1, c.C2, c.C3, c.C4, c.C5) != (a, C1, C2, C3, 0, 8):
            bad.append(p)
    out.append(CheckResult("constants formulas p <= 13", not bad, f"mismatch for {bad}" if bad else ""))
    cs = build_constant_set(gf(3, 4), 2, 4)
    out.append(CheckResult("constant set independence", independence_holds(cs), str(cs.r)))
    sys = gen_e_system(3, 1)
    blob = serialize(sys)
    out.append(CheckResult("serialization round trip", serialize(parse(blob)) == blob))
    return out


def _suite_witness(rng: random.Random) -> list[CheckResult]:
    bad = 0
    for p in (2, 3, 5):
        F = gf(p)
        for s in range(4):
            for _ in range(5):
                x = random_ratfunc(F, rng, 2, nonzero=False)
                pa = p
                v = artin_schreier_witness(x, pa, s)
                if v**pa - v != x ** (pa**s) - x:
                    bad += 1
    out = [CheckResult("Artin-Schreier identity", bad == 0, f"{bad} failures")]
    ok = True
    for p in (3, 5):
        for s in (0, 1):
            asg = build_e_witness(RatFunc.t(gf(p)) + 1, p, s)
            ok &= verify_assignment(gen_full_pk_pair_system(p, s), asg).ok
    out.append(CheckResult("pair-system witnesses verify", ok))
    return out


def _suite_integrality(rng: random.Random) -> list[CheckResult]:
    F = gf(3)
    bad = []
    for w in enumerate_ratfuncs(F, 2):
        obstructed = pole_obstruction_at_zero_of_t(w, 2)
        if not w.is_zero():
            prof = divisor_mod_q_profile(w, 2)
            if any(r for pl, r in prof.items() if pl != finite_place(F, (0, 1))):
                bad.append(str(w))
        h = compute_h(w, 2)
        if (ord_at(h, finite_place(F, (0, 1))) % 2 != 0) != obstructed:
            bad.append(str(w))
    out = [CheckResult("h_w dichotomy sweep", not bad, ", ".join(bad[:3]))]
    hinv = MultiPoly.var(F, "hinv")
    nf = norm_form_from_minpoly(F, [-(hinv + 1), MultiPoly.zero(F), MultiPoly.const(F, 1)], 2)
    a0, a1 = MultiPoly.var(F, "a0"), MultiPoly.var(F, "a1")
    out.append(CheckResult("quadratic norm form", nf.P == a0**2 - (hinv + 1) * a1**2))
    ok = True
    for _ in range(10):
        y = random_ratfunc(F, rng)
        a = solve_norm_form_split(y, [RatFunc.const(F, 1), RatFunc.const(F, 2)])
        ok &= a[0] ** 2 - a[1] ** 2 == y
    out.append(CheckResult("split norm solve", ok))
    gen_norm_form(default_tower(3))
    return out


def _suite_compiler(rng: random.Random) -> list[CheckResult]:
    out = []
    for p, text in ((3, "x1 + x2 = x3"), (2, "x1 |p x2"), (3, "x1 |p x1")):
        rep = restricted_model_check(parse_formula(text), p, 4, 1, CompileParams.default(p, 4), text)
        out.append(CheckResult(f"round trip '{text}' p={p}", rep.ok, f"{len(rep.mismatched)} mismatches"))
    return out


def _suite_solver(rng: random.Random) -> list[CheckResult]:
    out = []
    for F, H in ((gf(2), 2), (gf(3), 1)):
        seen = set()
        for dn in range(H + 1):
            for den in _polys(F, dn, monic=True):
                for nd in range(H + 1):
                    for num in _polys(F, nd, monic=False):
                        seen.add(RatFunc(F, num, den))
        seen.add(RatFunc.const(F, 0))
        out.append(CheckResult(f"enumeration count F_{F.q} H<={H}", len(seen) == count_ratfuncs(F, H), f"{len(seen)}"))
    F = gf(3)
    w = MultiPoly.var(F, "w")
    sys = EquationSystem(F, ["w"], [Equation.leaf(w - MultiPoly.const(F, RatFunc.t(F)))])
    rep = solve_bounded(sys, SearchBounds.uniform(["w"], 1))
    out.append(CheckResult("solve w = t", [s["w"] for s in rep.solutions] == [RatFunc.t(F)]))
    return out


def _polys(F, d, monic):
    if d == 0:
        return [(1,)] if monic else [(c,) for c in range(1, F.q)]
    leads = [1] if monic else range(1, F.q)
    return [tuple(low) + (c,) for c in leads for low in itertools.product(range(F.q), repeat=d)]


SUITES: dict[str, Callable[[random.Random], list[CheckResult]]] = {
    "ff_core": _suite_ff_core,
    "templates": _suite_templates,
    "witness": _suite_witness,
    "integrality": _suite_integrality,
    "compiler": _suite_compiler,
    "solver": _suite_solver,
}


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    if name == "all":
        out = []
        for n in SUITES:
            out += [CheckResult(f"{n}: {r.name}", r.ok, r.detail) for r in SUITES[n](random.Random(seed))]
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite '{name}'; choose from {sorted(SUITES) + ['all']}")
    return SUITES[name](random.Random(seed))
