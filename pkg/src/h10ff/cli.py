"""Command-line front end: every subcommand is a thin adapter over a library call."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from .checks import run_suite
from .compiler import CompileParams, FormulaError, compile_formula, oracle_solve_z, parse_formula, restricted_model_check
from .fields import gf
from .integrality import (construct_int_witness, default_tower, gen_int_definition, gen_norm_form, int_system,
                          make_tower, norm_search)
from .places import derivative, divisor_of, height, ord_at, parse_place, riemann_roch_basis, Divisor
from .ratfunc import ParseError, RatFunc, parse_ratfunc
from .solver import check_pk_power_theorem, parse_bounds, solve_bounded
from .system import EquationSystem, parse, serialize
from .templates import (TemplateError, build_constant_set, compute_constants, gen_d_system, gen_e2_system,
                        gen_e_system, gen_full_pk_pair_system, gen_getdown_equation, gen_pk_power_of_t_system)
from .witness import (WitnessError, assignment_from_json, assignment_to_json, build_d_system_witness,
                      build_e_witness, build_pk_power_witness, verify_assignment)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _field(args):
    if args.p is None:
        raise UsageError("--p is required")
    mod = None
    if args.modulus:
        m = parse_ratfunc(gf(args.p), args.modulus)
        if not m.is_poly():
            raise UsageError("--modulus must be a polynomial")
        mod = tuple(m.num)
    try:
        return gf(args.p, args.k, mod)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, obj: Any) -> None:
    if isinstance(obj, (bytes, bytearray)):
        text = obj.decode()
        if args.pretty:
            text = json.dumps(json.loads(text), indent=2)
    else:
        text = json.dumps(obj, indent=2 if args.pretty else None, separators=None if args.pretty else (",", ":"))
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


# -- subcommands -------------------------------------------------------------

def cmd_eval(args) -> int:
    F = _field(args)
    if not args.expr:
        raise UsageError("--expr is required")
    x = parse_ratfunc(F, args.expr)
    if args.op == "ord":
        if not args.place:
            raise UsageError("--place is required for --op ord")
        _emit(args, ord_at(x, parse_place(F, args.place)))
    elif args.op == "height":
        _emit(args, height(x))
    elif args.op == "derivative":
        _emit(args, str(derivative(x)))
    elif args.op == "divisor":
        _emit(args, divisor_of(x).to_json(F))
    else:
        _emit(args, str(x))
    return EXIT_OK


def cmd_constants(args) -> int:
    if args.p is None:
        raise UsageError("--p is required")
    _emit(args, compute_constants(args.p, args.C).to_json())
    return EXIT_OK


def cmd_cset(args) -> int:
    _emit(args, build_constant_set(_field(args), args.count, args.exp_bound).to_json())
    return EXIT_OK


def cmd_rr(args) -> int:
    F = _field(args)
    D = Divisor.from_json(F, json.loads(args.divisor))
    _emit(args, [str(b) for b in riemann_roch_basis(F, D)])
    return EXIT_OK


def _clamp(args) -> int:
    """Desk runs use every constant built; the full template would need C5 of them."""
    return args.count if args.clamp is None else args.clamp


def _template(args) -> EquationSystem:
    name = args.name
    p = args.p
    if p is None:
        raise UsageError("--p is required")
    if name == "pk_power":
        F = _field(args)
        cs = build_constant_set(F, args.count, args.exp_bound)
        return gen_pk_power_of_t_system(p, cs, compute_constants(p), clamp=_clamp(args))
    if name == "d_system":
        F = _field(args)
        cs = build_constant_set(F, args.count, args.exp_bound)
        return gen_d_system(p, compute_constants(p).a, args.s, cs)
    if name == "e_system":
        return gen_e_system(p, args.s, args.j, args.r, _field(args))
    if name == "e2_system":
        return gen_e2_system(args.s, args.j, args.r, _field(args))
    if name == "pk_pair":
        return gen_full_pk_pair_system(p, args.s, _field(args))
    if name == "int":
        return gen_int_definition(make_tower(_field(args), args.q))
    raise UsageError(f"unknown template '{name}'")


def cmd_template(args) -> int:
    if args.name == "getdown":
        F = _field(args)
        el = lambda s: parse_ratfunc(F, s).const_value()
        poly = gen_getdown_equation(el(args.b), el(args.b2), el(args.c), el(args.c2), args.p, compute_constants(args.p).a, F)
        _emit(args, {"terms": poly.to_json()})
        return EXIT_OK
    if args.name == "norm_form":
        nf = gen_norm_form(make_tower(_field(args), args.q))
        _emit(args, {"q": nf.q, "rule": nf.rule, "P": str(nf.P), "terms": nf.P.to_json()})
        return EXIT_OK
    _emit(args, serialize(_template(args)))
    return EXIT_OK


def cmd_witness(args) -> int:
    F = _field(args)
    p, name = args.p, args.name
    x = parse_ratfunc(F, args.expr) if args.expr else RatFunc.t(F)
    if name == "pk_power":
        cs = build_constant_set(F, args.count, args.exp_bound)
        sys_ = gen_pk_power_of_t_system(p, cs, compute_constants(p), clamp=_clamp(args))
        asg = build_pk_power_witness(p, args.s, cs, sys_)
    elif name == "d_system":
        cs = build_constant_set(F, args.count, args.exp_bound)
        a = compute_constants(p).a
        sys_ = gen_d_system(p, a, args.s, cs)
        asg = build_d_system_witness(x, p, a, args.s, cs, sys_)
    elif name in ("e", "pk_pair"):
        sys_ = gen_full_pk_pair_system(p, args.s, F)
        asg = build_e_witness(x, p, args.s)
    elif name == "int":
        ts = make_tower(F, args.q)
        sys_ = int_system(ts)
        asg = construct_int_witness(x, ts)
        if asg is None:
            _emit(args, {"assignment": None, "verdict": {"verdict": "NoWitnessConstructed"}})
            return EXIT_VIOLATION
    else:
        raise UsageError(f"unknown witness '{name}'")
    verdict = verify_assignment(sys_, asg)
    _emit(args, {"assignment": assignment_to_json(asg), "verdict": verdict.to_json()})
    return EXIT_OK if verdict.ok else EXIT_VIOLATION


def _load_system(args) -> EquationSystem:
    if not args.input:
        raise UsageError("--in is required")
    return parse(_read(args.input))


def cmd_verify(args) -> int:
    sys_ = _load_system(args)
    if not args.assignment:
        raise UsageError("--assignment is required")
    asg = assignment_from_json(sys_.field, json.loads(_read(args.assignment)))
    verdict = verify_assignment(sys_, asg)
    _emit(args, verdict.to_json())
    return EXIT_OK if verdict.ok else EXIT_VIOLATION


def cmd_solve(args) -> int:
    sys_ = _load_system(args)
    bounds = parse_bounds(sys_.field, args.bounds or "", args.bound or 0)
    rep = solve_bounded(sys_, bounds, max_solutions=args.max_solutions, max_candidates=args.max_candidates)
    _emit(args, rep.to_json())
    return EXIT_OK


def _formula(args):
    if args.formula is None:
        raise UsageError("--formula is required")
    return parse_formula(args.formula)


def cmd_compile(args) -> int:
    ast = _formula(args)
    params = CompileParams.default(args.p, args.bound or 6)
    _emit(args, serialize(compile_formula(ast, params)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    ast = _formula(args)
    sols = sorted(oracle_solve_z(ast, args.bound or 6, args.p))
    _emit(args, {"variables": ast.variables, "count": len(sols), "solutions": [list(s) for s in sols]})
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    ast = _formula(args)
    rep = restricted_model_check(ast, args.p, args.bound or 6, args.hbound, text=args.formula)
    _emit(args, rep.to_json())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    F = gf(args.p)
    extra = [parse_ratfunc(F, e) for e in args.extra or []]
    rep = check_pk_power_theorem(args.p, args.hw, args.hwit, extra)
    _emit(args, rep.to_json())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_norm(args) -> int:
    F = _field(args)
    ts = make_tower(F, args.q)
    w = parse_ratfunc(F, args.expr)
    _emit(args, norm_search(w, ts, args.bound or 0).to_json())
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        results = run_suite(args.suite, args.seed)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    ok = all(r.ok for r in results)
    _emit(args, {"suite": args.suite, "seed": args.seed, "ok": ok, "results": [r.to_json() for r in results]})
    return EXIT_OK if ok else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--k", type=int, default=1)
    common.add_argument("--modulus")
    common.add_argument("--pretty", action="store_true")
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="h10ff", description="Diophantine machinery over F_q(t).")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("eval", cmd_eval, "order, height, derivative or divisor of an expression")
    sp.add_argument("--expr")
    sp.add_argument("--op", choices=["ord", "height", "derivative", "divisor", "canonical"], default="canonical")
    sp.add_argument("--place")

    sp = add("constants", cmd_constants, "the constants record")
    sp.add_argument("--C", type=int, default=1)

    sp = add("cset", cmd_cset, "build a constant set")
    sp.add_argument("--count", type=int, default=2)
    sp.add_argument("--exp-bound", type=int, default=0)

    sp = add("rr", cmd_rr, "Riemann-Roch basis of a divisor given as JSON")
    sp.add_argument("--divisor", required=True)

    for name, func in (("template", cmd_template), ("witness", cmd_witness)):
        sp = add(name, func, f"{name} by name")
        sp.add_argument("name")
        sp.add_argument("--s", type=int, default=1)
        sp.add_argument("--j", type=int)
        sp.add_argument("--r", type=int)
        sp.add_argument("--q", type=int, default=2)
        sp.add_argument("--count", type=int, default=2)
        sp.add_argument("--exp-bound", type=int, default=0)
        sp.add_argument("--clamp", type=int)
        sp.add_argument("--expr")
        for flag in ("--b", "--b2", "--c", "--c2"):
            sp.add_argument(flag, default="0")

    sp = add("verify", cmd_verify, "verify an assignment against a system")
    sp.add_argument("--in", dest="input")
    sp.add_argument("--assignment")

    sp = add("solve", cmd_solve, "bounded exhaustive search")
    sp.add_argument("--in", dest="input")
    sp.add_argument("--bounds")
    sp.add_argument("--bound", type=int)
    sp.add_argument("--max-solutions", type=int)
    sp.add_argument("--max-candidates", type=int)

    for name, func, help_ in (("compile", cmd_compile, "formula to system"),
                              ("oracle", cmd_oracle, "brute-force solutions over Z+"),
                              ("roundtrip", cmd_roundtrip, "restricted model check")):
        sp = add(name, func, help_)
        sp.add_argument("--formula")
        sp.add_argument("--bound", type=int)
        sp.add_argument("--hbound", type=int, default=2)

    sp = add("sweep", cmd_sweep, "desk-scale sweep for powers of t")
    sp.add_argument("--hw", type=int, default=2)
    sp.add_argument("--hwit", type=int, default=4)
    sp.add_argument("--extra", nargs="*")

    sp = add("norm", cmd_norm, "bounded search for the INT norm equation")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--bound", type=int)

    sp = add("check", cmd_check, "invariant suites")
    sp.add_argument("suite")
    return ap


def _threads() -> int:
    raw = os.environ.get("H10FF_THREADS", "1")
    if not raw.isdigit() or int(raw) < 1:
        raise UsageError("H10FF_THREADS must be a positive integer")
    return int(raw)


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _threads()
        return args.func(args)
    except (UsageError, ParseError, FormulaError, TemplateError, WitnessError, ValueError, KeyError, OSError) as exc:
        print(f"h10ff {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
