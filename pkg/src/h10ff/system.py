"""Equation systems over F_q(t): data model, evaluation and JSON form.

An equation is a tree.  A leaf is a polynomial asserted to vanish together
with the denominators that were cleared to obtain it.  Inner nodes are
polynomial operations that encode logic over F_q(t):

* ``fold``: left fold f, g -> f^2 - t*g^2, zero iff every child is zero
  (t is not a square in F_q(t));
* ``prod``: product of the children, zero iff some child is zero.

Keeping the tree lets verification run factor by factor; `expand()` yields
the flat polynomial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping

from .fields import GF, gf
from .multipoly import MultiPoly
from .ratfunc import RatFunc, parse_ratfunc

OK, VIOLATED, SPURIOUS = "ok", "violated", "spurious"


@dataclass
class Equation:
    kind: str  # "leaf", "fold" or "prod"
    poly: MultiPoly | None = None
    dens: list[MultiPoly] = dc_field(default_factory=list)
    children: list["Equation"] = dc_field(default_factory=list)

    @classmethod
    def leaf(cls, poly: MultiPoly, dens: Iterable[MultiPoly] = ()) -> "Equation":
        return cls("leaf", poly=poly, dens=[d for d in dens if not d.is_const()])

    @classmethod
    def fold(cls, children: list["Equation"]) -> "Equation":
        if not children:
            raise ValueError("empty conjunction")
        return children[0] if len(children) == 1 else cls("fold", children=list(children))

    @classmethod
    def prod(cls, children: list["Equation"]) -> "Equation":
        if not children:
            raise ValueError("empty disjunction")
        return children[0] if len(children) == 1 else cls("prod", children=list(children))

    def unknowns(self) -> set[str]:
        if self.kind == "leaf":
            out = set(self.poly.unknowns())
            for d in self.dens:
                out |= d.unknowns()
            return out
        out: set[str] = set()
        for c in self.children:
            out |= c.unknowns()
        return out

    def leaves(self, path: tuple = ()):
        if self.kind == "leaf":
            yield path, self
        else:
            for i, c in enumerate(self.children):
                yield from c.leaves(path + (i,))

    def expand(self) -> MultiPoly:
        if self.kind == "leaf":
            return self.poly
        parts = [c.expand() for c in self.children]
        if self.kind == "prod":
            acc = parts[0]
            for q in parts[1:]:
                acc = acc * q
            return acc
        return fold_polys(parts)

    def value(self, values: Mapping[str, RatFunc]) -> RatFunc:
        """Value of the expanded polynomial, computed through the tree."""
        if self.kind == "leaf":
            return self.poly.evaluate(values)
        vals = [c.value(values) for c in self.children]
        if self.kind == "prod":
            acc = vals[0]
            for v in vals[1:]:
                acc = acc * v
            return acc
        t = RatFunc.t(vals[0].F)
        acc = vals[0]
        for v in vals[1:]:
            acc = acc * acc - t * v * v
        return acc

    def status(self, values: Mapping[str, RatFunc]) -> tuple[str, tuple | None]:
        """(verdict, path of the offending leaf) under exact substitution."""
        return self._status(values, ())

    def _status(self, values, path):
        if self.kind == "leaf":
            if not self.poly.evaluate(values).is_zero():
                return VIOLATED, path
            for d in self.dens:
                if d.evaluate(values).is_zero():
                    return SPURIOUS, path
            return OK, None
        results = [c._status(values, path + (i,)) for i, c in enumerate(self.children)]
        if self.kind == "prod":
            if any(r[0] == OK for r in results):
                return OK, None
            spur = next((r for r in results if r[0] == SPURIOUS), None)
            return spur if spur else (VIOLATED, path)
        bad = next((r for r in results if r[0] == VIOLATED), None)
        if bad:
            return bad
        spur = next((r for r in results if r[0] == SPURIOUS), None)
        return spur if spur else (OK, None)

    def rename(self, mapping: Mapping[str, str]) -> "Equation":
        if self.kind == "leaf":
            return Equation("leaf", poly=self.poly.rename(mapping), dens=[d.rename(mapping) for d in self.dens])
        return Equation(self.kind, children=[c.rename(mapping) for c in self.children])

    def substitute(self, values: Mapping[str, MultiPoly | RatFunc]) -> "Equation":
        if self.kind == "leaf":
            return Equation.leaf(self.poly.substitute(values), [d.substitute(values) for d in self.dens])
        return Equation(self.kind, children=[c.substitute(values) for c in self.children])

    def to_json(self) -> dict:
        if self.kind == "leaf":
            return {"terms": self.poly.to_json()}
        return {self.kind: [c.to_json() for c in self.children]}


def fold_polys(parts: list[MultiPoly]) -> MultiPoly:
    acc = parts[0]
    t = RatFunc.t(acc.F)
    for q in parts[1:]:
        acc = acc * acc - q * q * t
    return acc


@dataclass
class EquationSystem:
    field: GF
    unknowns: list[str]
    equations: list[Equation]
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        declared = set(self.unknowns)
        if len(declared) != len(self.unknowns):
            raise ValueError("duplicate unknown declaration")
        for i, eq in enumerate(self.equations):
            extra = eq.unknowns() - declared
            if extra:
                raise ValueError(f"equation {i} uses undeclared unknowns {sorted(extra)}")

    def cleared_denominators(self) -> list[dict]:
        out = []
        for i, eq in enumerate(self.equations):
            for path, leaf in eq.leaves():
                for d in leaf.dens:
                    out.append({"eq": i, "path": list(path), "terms": d.to_json()})
        return out

    def to_json(self) -> dict:
        meta = dict(self.meta)
        meta["cleared_denominators"] = self.cleared_denominators()
        return {
            "field": self.field.spec(),
            "unknowns": list(self.unknowns),
            "equations": [eq.to_json() for eq in self.equations],
            "meta": meta,
        }

    def expanded(self) -> list[MultiPoly]:
        return [eq.expand() for eq in self.equations]


def serialize(sys: EquationSystem) -> bytes:
    return json.dumps(sys.to_json(), separators=(",", ":"), ensure_ascii=True).encode()


def _parse_field(data: dict) -> GF:
    p, k = int(data["p"]), int(data["k"])
    mod = data.get("modulus")
    if mod is None:
        return gf(p, k)
    base = gf(p, 1)
    m = parse_ratfunc(base, mod)
    if not m.is_poly():
        raise ValueError("modulus must be a polynomial")
    coeffs = tuple(m.num)
    if k == 1 and len(coeffs) == 2:
        return gf(p, 1)
    return gf(p, k, coeffs)


def _parse_equation(F: GF, data, declared: set[str]) -> Equation:
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError("malformed equation")
    (key, val), = data.items()
    if key == "terms":
        return Equation.leaf(MultiPoly.from_json(F, val, declared))
    if key in ("fold", "prod"):
        if not isinstance(val, list) or len(val) < 2:
            raise ValueError(f"'{key}' needs at least two children")
        return Equation(key, children=[_parse_equation(F, c, declared) for c in val])
    raise ValueError(f"unknown equation node '{key}'")


def parse(blob: bytes | str) -> EquationSystem:
    try:
        data = json.loads(blob)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"field", "unknowns", "equations", "meta"}:
        raise ValueError("malformed system object")
    F = _parse_field(data["field"])
    unknowns = data["unknowns"]
    if not isinstance(unknowns, list) or not all(isinstance(u, str) for u in unknowns):
        raise ValueError("unknowns must be a list of names")
    declared = set(unknowns)
    eqs = [_parse_equation(F, e, declared) for e in data["equations"]]
    meta = dict(data["meta"])
    dens = meta.pop("cleared_denominators", [])
    for entry in dens:
        eq = eqs[entry["eq"]]
        node = eq
        for i in entry["path"]:
            node = node.children[i]
        if node.kind != "leaf":
            raise ValueError("cleared denominator does not point at a leaf")
        node.dens.append(MultiPoly.from_json(F, entry["terms"], declared))
    return EquationSystem(F, list(unknowns), eqs, meta)


def combine_to_single(sys: EquationSystem) -> MultiPoly:
    """One polynomial with the same zero set as the whole system."""
    if not sys.equations:
        raise ValueError("nothing to combine")
    return fold_polys(sys.expanded())
