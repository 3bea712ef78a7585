"""Existential formulas over (Z+, +, |p): parsing, a brute-force oracle, and
compilation to polynomial systems over F_p(t) with n encoded as t^n."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .fields import gf
from .integrality import (TowerSpec, construct_int_witness, coordinate_equations, default_tower,
                          int_system, pole_obstruction_at_zero_of_t, t_adic_sieve)
from .multipoly import MultiPoly
from .ratfunc import RatFunc
from .system import Equation, EquationSystem
from .templates import gen_full_pk_pair_system
from .witness import WitnessError, build_e_witness, verify_assignment


class FormulaError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


# -- AST ------------------------------------------------------------------

@dataclass(frozen=True)
class SumEq:
    x: str
    y: str
    z: str

    def vars(self):
        return (self.x, self.y, self.z)

    def __str__(self):
        return f"{self.x} + {self.y} = {self.z}"


@dataclass(frozen=True)
class PDiv:
    x: str
    y: str

    def vars(self):
        return (self.x, self.y)

    def __str__(self):
        return f"{self.x} |p {self.y}"


@dataclass(frozen=True)
class ConstEq:
    x: str
    n: int

    def vars(self):
        return (self.x,)

    def __str__(self):
        return f"{self.x} = {self.n}"


@dataclass
class Formula:
    variables: list[str] = dc_field(default_factory=list)
    atoms: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        out = []
        for a in self.atoms:
            kind = type(a).__name__
            out.append({"kind": kind, **{k: getattr(a, k) for k in a.__dataclass_fields__}})
        return {"variables": list(self.variables), "atoms": out}


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<nat>\d+)|(?P<op>\|p|[+=&*()\-/^|]))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaError(f"unexpected character '{text[start]}'", start)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_formula(text: str) -> Formula:
    """formula := atom ("&" atom)* ; atom := v "+" v "=" v | v "|p" v | v "=" nat."""
    toks = _tokens(text)
    i = 0
    f = Formula()

    def take(kind, value=None):
        nonlocal i
        k, v, pos = toks[i]
        if k == "op" and v == "*":
            raise FormulaError("multiplication not in language", pos)
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = v or "end of input"
            raise FormulaError(f"expected {want}, found '{got}'", pos)
        i += 1
        return v

    def var():
        name = take("name")
        if name not in f.variables:
            f.variables.append(name)
        return name

    if toks[0][0] == "end":
        return f
    while True:
        x = var()
        k, v, pos = toks[i]
        if k == "op" and v == "*":
            raise FormulaError("multiplication not in language", pos)
        if (k, v) == ("op", "+"):
            i += 1
            y = var()
            take("op", "=")
            f.atoms.append(SumEq(x, y, var()))
        elif (k, v) == ("op", "|p"):
            i += 1
            f.atoms.append(PDiv(x, var()))
        elif (k, v) == ("op", "="):
            i += 1
            n = int(take("nat"))
            if n < 1:
                raise FormulaError("constants must be positive integers", toks[i - 1][2])
            f.atoms.append(ConstEq(x, n))
        else:
            raise FormulaError(f"expected '+', '|p' or '=', found '{v or 'end of input'}'", pos)
        k, v, pos = toks[i]
        if k == "end":
            return f
        take("op", "&")


# -- oracle -----------------------------------------------------------------

def pdiv_holds(n: int, m: int, p: int) -> bool:
    if m % n:
        return False
    r = m // n
    while r % p == 0:
        r //= p
    return r == 1


def atom_holds(atom, vals: dict[str, int], p: int) -> bool:
    if isinstance(atom, SumEq):
        return vals[atom.x] + vals[atom.y] == vals[atom.z]
    if isinstance(atom, PDiv):
        return pdiv_holds(vals[atom.x], vals[atom.y], p)
    return vals[atom.x] == atom.n


def oracle_solve_z(ast: Formula, bound: int, p: int) -> set[tuple[int, ...]]:
    """Tuples over {1..bound}, in the order of first appearance of the variables."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    out = set()
    for tup in itertools.product(range(1, bound + 1), repeat=len(ast.variables)):
        vals = dict(zip(ast.variables, tup))
        if all(atom_holds(a, vals, p) for a in ast.atoms):
            out.add(tup)
    return out


# -- compilation -------------------------------------------------------------

def z_name(v: str) -> str:
    return f"z_{v}"


@dataclass
class CompileParams:
    p: int
    s_max: int
    tower: TowerSpec

    @classmethod
    def default(cls, p: int, z_bound: int = 6) -> "CompileParams":
        return cls(p, max(0, int(math.floor(math.log(z_bound, p) + 1e-9))), default_tower(p))


def _int_block(prefix: str, arg_eq_builder, ts: TowerSpec) -> tuple[list[Equation], list[str]]:
    """Equations placing the argument (unknown prefix+'w') in INT, with fresh names."""
    base = int_system(ts)
    ren = {u: prefix + u for u in base.unknowns}
    eqs = [arg_eq_builder(ren["w"])] + [eq.rename(ren) for eq in base.equations]
    return eqs, [ren[u] for u in base.unknowns]


def compile_formula(ast: Formula, params: CompileParams) -> EquationSystem:
    p, ts = params.p, params.tower
    F = ts.field
    t = MultiPoly.const(F, RatFunc.t(F))
    var = lambda name: MultiPoly.var(F, name)
    unknowns = [z_name(v) for v in ast.variables]
    eqs: list[Equation] = []
    meta_vars, meta_atoms = {}, []

    def add(block_eqs):
        start = len(eqs)
        eqs.extend(block_eqs)
        return list(range(start, len(eqs)))

    for vi, v in enumerate(ast.variables):
        prefix = f"var{vi}__"
        block, names = _int_block(prefix, lambda arg, v=v: Equation.leaf(var(arg) * t - var(z_name(v))), ts)
        unknowns += names
        meta_vars[v] = {"int_block": add(block), "argument": f"{z_name(v)}/t"}

    for k, atom in enumerate(ast.atoms):
        prefix = f"atom{k}__"
        entry = {"atom": str(atom), "kind": type(atom).__name__, "pk_blocks": [], "int_blocks": []}
        if isinstance(atom, SumEq):
            entry["equations"] = add([Equation.leaf(var(z_name(atom.z)) - var(z_name(atom.x)) * var(z_name(atom.y)))])
        elif isinstance(atom, ConstEq):
            tn = MultiPoly.const(F, RatFunc.tpow(F, atom.n))
            entry["equations"] = add([Equation.leaf(var(z_name(atom.x)) - tn)])
        else:
            wname = prefix + "w"
            unknowns.append(wname)
            alts = []
            for s in range(params.s_max + 1):
                sub = gen_full_pk_pair_system(p, s, F)
                ren = {u: f"{prefix}s{s}__{u}" for u in sub.unknowns}
                ren["x"], ren["y"] = z_name(atom.x), wname
                unknowns += [ren[u] for u in sub.unknowns if u not in ("x", "y")]
                alts.append(Equation.fold([e.rename(ren) for e in sub.equations]))
            pk = add([Equation.prod(alts)])
            zy = var(z_name(atom.y))
            b1, n1 = _int_block(prefix + "int0__", lambda arg: Equation.leaf(var(arg) * zy - var(wname)), ts)
            b2, n2 = _int_block(prefix + "int1__", lambda arg: Equation.leaf(var(arg) * var(wname) - zy), ts)
            unknowns += n1 + n2
            entry["pk_blocks"] = [{"equations": pk, "s_max": params.s_max}]
            entry["int_blocks"] = [
                {"equations": add(b1), "argument": f"{wname}/{z_name(atom.y)}"},
                {"equations": add(b2), "argument": f"{z_name(atom.y)}/{wname}"},
            ]
            entry["equations"] = pk + entry["int_blocks"][0]["equations"] + entry["int_blocks"][1]["equations"]
        meta_atoms.append(entry)

    meta = {
        "template": "compiled_formula",
        "params": {"p": p, "s_max": params.s_max, "tower": ts.to_json(), "variables": list(ast.variables)},
        "variables": meta_vars,
        "atoms": meta_atoms,
    }
    return EquationSystem(F, unknowns, eqs, meta)


# -- restricted model check ----------------------------------------------------

@lru_cache(maxsize=512)
def _int_witness_cached(w: RatFunc, ts: TowerSpec):
    return construct_int_witness(w, ts)


@lru_cache(maxsize=512)
def _int_refutation(w: RatFunc, ts: TowerSpec, bound: int) -> str | None:
    """Reason why w is not in INT up to the bound, or None if that cannot be shown."""
    if not pole_obstruction_at_zero_of_t(w, ts.q):
        return None
    names, eqs = coordinate_equations(w, ts)
    sieve = t_adic_sieve(ts.field, names, eqs, bound)
    if not sieve.refuted:  # pragma: no cover - the obstruction implies refutation
        return None
    return f"pole at (t); no INT coordinates with height <= {bound} ({sieve.reason})"


def forced_partner(x: RatFunc, p: int, s: int) -> RatFunc | None:
    """The unique y allowed by the fixed-s pair system for this x, or None if none is."""
    F = x.F
    t = RatFunc.t(F)
    T = t ** (p**s)
    if p == 2:
        x2 = x**2
        if (x2 + t).is_zero():
            return None
        v = ((x2 + t**2 + t) / (x2 + t)) ** (2**s)
        if v.is_one():
            return None
        yp = (T**2 + T + v * T) / (v + 1)
    else:
        xp = x**p
        if (xp - t).is_zero():
            return None
        v = ((xp + t) / (xp - t)) ** (p**s)
        if v.is_one():
            return None
        yp = T * (v + 1) / (v - 1)
    return yp.pth_root()


@dataclass
class ModelCheckReport:
    formula: str
    p: int
    bound_z: int
    bound_h: int
    matched: list = dc_field(default_factory=list)
    mismatched: list = dc_field(default_factory=list)
    bounded_only: list = dc_field(default_factory=list)
    oracle_count: int = 0
    compiled_count: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatched

    def to_json(self) -> dict:
        return {
            "formula": self.formula, "p": self.p, "boundZ": self.bound_z, "boundH": self.bound_h,
            "matched": [list(m) for m in self.matched],
            "mismatched": self.mismatched,
            "boundedOnly": self.bounded_only,
            "oracleSolutions": self.oracle_count,
            "compiledSolutions": self.compiled_count,
        }


def _int_assignment(prefix: str, w: RatFunc, ts: TowerSpec) -> dict | None:
    asg = _int_witness_cached(w, ts)
    if asg is None:
        return None
    return {prefix + k: v for k, v in asg.items()}


def _zero_fill(sys: EquationSystem, asg: dict) -> dict:
    zero = RatFunc.const(sys.field, 0)
    return {u: asg.get(u, zero) for u in sys.unknowns}


def restricted_model_check(ast: Formula, p: int, bound_z: int, bound_h: int = 2,
                           params: CompileParams | None = None, text: str = "") -> ModelCheckReport:
    params = params or CompileParams.default(p, bound_z)
    ts = params.tower
    F = ts.field
    sys = compile_formula(ast, params)
    oracle = oracle_solve_z(ast, bound_z, p)
    rep = ModelCheckReport(text or " & ".join(str(a) for a in ast.atoms), p, bound_z, bound_h, oracle_count=len(oracle))
    t = RatFunc.t(F)

    for tup in itertools.product(range(1, bound_z + 1), repeat=len(ast.variables)):
        vals = dict(zip(ast.variables, tup))
        z = {v: RatFunc.tpow(F, n) for v, n in vals.items()}
        asg = {z_name(v): z[v] for v in ast.variables}
        sat = True
        bounded = []
        for vi, v in enumerate(ast.variables):
            part = _int_assignment(f"var{vi}__", z[v] / t, ts)
            if part is None:
                sat = False
                bounded.append(f"no INT witness for {z_name(v)}/t")
                break
            asg.update(part)
        # exact atoms first: a tuple they refute needs no bounded argument
        for atom in ast.atoms:
            if not sat:
                break
            if isinstance(atom, SumEq):
                sat = z[atom.z] == z[atom.x] * z[atom.y]
            elif isinstance(atom, ConstEq):
                sat = z[atom.x] == RatFunc.tpow(F, atom.n)
        for k, atom in enumerate(ast.atoms):
            if not sat:
                break
            if isinstance(atom, PDiv):
                prefix = f"atom{k}__"
                found = False
                reasons = []
                for s in range(params.s_max + 1):
                    y = forced_partner(z[atom.x], p, s)
                    if y is None:
                        reasons.append(f"s={s}: pair system unsolvable")
                        continue
                    arg0, arg1 = y / z[atom.y], z[atom.y] / y
                    why = _int_refutation(arg0, ts, bound_h) or _int_refutation(arg1, ts, bound_h)
                    if why is not None:
                        reasons.append(f"s={s}: w = {y.pretty()} forced; {why}")
                        continue
                    i0 = _int_assignment(prefix + "int0__", arg0, ts)
                    i1 = _int_assignment(prefix + "int1__", arg1, ts)
                    try:
                        pk = build_e_witness(z[atom.x], p, s)
                    except WitnessError as exc:  # pragma: no cover
                        reasons.append(f"s={s}: {exc}")
                        continue
                    if i0 is None or i1 is None:
                        reasons.append(f"s={s}: INT witness not constructed")
                        continue
                    ren = {u: f"{prefix}s{s}__{u}" for u in pk}
                    ren["x"], ren["y"] = z_name(atom.x), prefix + "w"
                    asg.update({ren[u]: val for u, val in pk.items()})
                    asg.update(i0)
                    asg.update(i1)
                    found = True
                    break
                sat = found
                if not found:
                    bounded.append(f"{atom}: " + "; ".join(reasons))
        if sat:
            verdict = verify_assignment(sys, _zero_fill(sys, asg))
            if not verdict.ok:
                rep.mismatched.append({"tuple": list(tup), "reason": f"constructed witness fails: {verdict.to_json()}"})
                continue
            rep.compiled_count += 1
        elif bounded:
            rep.bounded_only.append({"tuple": list(tup), "bound": bound_h, "detail": bounded})
        if sat == (tup in oracle):
            if sat:
                rep.matched.append(tup)
        else:
            rep.mismatched.append({"tuple": list(tup), "oracle": tup in oracle, "compiled": sat})
    return rep
