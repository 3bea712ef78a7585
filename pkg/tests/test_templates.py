import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from h10ff.fields import gf
from h10ff.multipoly import MultiPoly
from h10ff.places import INF, finite_place
from h10ff.ratfunc import RatFunc, parse_ratfunc
from h10ff.system import Equation, EquationSystem, combine_to_single, fold_polys, parse, serialize
from h10ff.templates import (EnlargeK, TemplateError, admissible_constants, build_constant_set, compute_constants,
                             gen_d_system, gen_e2_system, gen_e_system, gen_full_pk_pair_system, gen_getdown_equation,
                             gen_pk_power_of_t_system, independence_holds, make_constant_set, mu_name)

from oracles import constants_by_hand

F3 = gf(3)


def mp(F, text_or_name):
    return MultiPoly.var(F, text_or_name)


def const(F, x):
    return MultiPoly.const(F, x if isinstance(x, RatFunc) else RatFunc.const(F, x))


# -- constants ---------------------------------------------------------------

def test_constants_examples():
    c = compute_constants(3, 1)
    assert (c.a, c.C1, c.C2, c.C3, c.C4, c.C5) == (1, 6, Fraction(7, 2), 64, 0, 8)
    c = compute_constants(2, 1)
    assert (c.a, c.C1, c.C2, c.C3, c.C4, c.C5) == (2, 8, 3, 97, 0, 8)
    assert compute_constants(5, 1).a == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
@pytest.mark.parametrize("C", [1, 2, 5])
def test_constants_formulas(p, C):
    c = compute_constants(p, C)
    assert (c.a, c.C1, c.C2, c.C3, c.C4, c.C5) == constants_by_hand(p, C)


def test_constants_rejects_bad_input():
    with pytest.raises(TemplateError):
        compute_constants(4)
    with pytest.raises(TemplateError):
        compute_constants(3, 0)


# -- constant sets -----------------------------------------------------------

def test_constant_set_f4():
    F4 = gf(2, 2)
    # F_4^* is cyclic of order 3: only one element of order > 1
    with pytest.raises(EnlargeK):
        build_constant_set(F4, 2, 1)
    cs = build_constant_set(F4, 2, 0)
    assert sorted(F4.order(c) for c in cs.elements) == [1, 3]


def test_constant_set_f81():
    F = gf(3, 4)
    cs = build_constant_set(F, 2, 4)
    orders = [F.order(c) for c in cs.elements]
    assert all(80 % o == 0 and o > 4 for o in orders)
    assert math.gcd(*orders) == 1
    assert independence_holds(cs)


def test_singleton_constant_set():
    for F in (gf(2), gf(3), gf(2, 3)):
        cs = build_constant_set(F, 1, 0)
        assert len(cs) == 1 and independence_holds(cs)


def test_independence_brute_force():
    F = gf(3, 2)
    for a, b in itertools.combinations(range(1, F.q), 2):
        cs = make_constant_set(F, [a, b], 2)
        expected = all(F.pow(a, n) != F.pow(b, m) for n in (-2, -1, 1, 2) for m in (-2, -1, 1, 2))
        assert independence_holds(cs) == expected


def test_admissible_constants():
    F9 = gf(3, 2)
    c = next(x for x in range(1, 9) if F9.order(x) == 8)
    cs = make_constant_set(F9, [c])
    z = parse_ratfunc(F9, "t") + 1
    # z - b vanishes at (t) iff b = 1; kept iff no Frobenius image of c is 1
    assert admissible_constants(z, cs, {finite_place(F9, (0, 1)), INF}) == [0]
    assert admissible_constants(RatFunc.t(F9), cs, {finite_place(F9, (0, 1))}) == [0]
    one = make_constant_set(F9, [1])
    assert admissible_constants(z, one, {finite_place(F9, (0, 1))}) == []
    # z = t^2 and the place (t - c): dropped iff c^2 = c^(p^j) for some j
    for x in range(1, 9):
        cs = make_constant_set(F9, [x])
        orbit = cs.orbits[0]
        dropped = any(F9.mul(x, x) == b for b in orbit)
        place = finite_place(F9, (F9.neg(x), 1))
        got = admissible_constants(parse_ratfunc(F9, "t^2"), cs, {place})
        assert (got == []) == dropped
    with pytest.raises(TemplateError):
        admissible_constants(RatFunc.const(F9, 1), cs, set())


# -- pk power of t ------------------------------------------------------------

def test_pk_power_system_shape():
    cs = build_constant_set(F3, 2, 0)
    sys = gen_pk_power_of_t_system(3, cs, compute_constants(3), clamp=2)
    assert [e.kind for e in sys.equations] == ["leaf", "leaf", "fold", "fold"]
    V = [len(o) for o in cs.orbits]
    assert len(sys.unknowns) == 3 + 2 * 2 * V[0] * V[1]
    w, v, u = mp(F3, "w"), mp(F3, "v"), mp(F3, "u")
    t = const(F3, RatFunc.t(F3))
    assert sys.equations[0].expand() == w - t - v**3 + v
    assert sys.equations[1].expand() == t - w - w * t * (u**3 - u)


def test_getdown_equation():
    F = F3
    w, u = mp(F, "w"), mp(F, "u_b")
    t = const(F, RatFunc.t(F))
    eq = gen_getdown_equation(0, 1, 0, 1, 3, 1)
    assert eq == (w - 1) * t - (t - 1) * w - w * t * (u**3 - u)
    assert eq.substitute({"w": RatFunc.t(F), "u_b": RatFunc.const(F, 0)}).is_zero()
    with pytest.raises(TemplateError):
        gen_getdown_equation(1, 1, 0, 1, 3, 1)


def test_getdown_satisfiable_for_frobenius_power():
    from h10ff.witness import artin_schreier_witness

    t = RatFunc.t(F3)
    w = t**3
    X = (w - 1) / w - (t - 1) / t
    # (w-1)/w - (t-1)/t = 1/t - 1/t^3 = -(x^3 - x) for x = 1/t
    u = -artin_schreier_witness(t.inverse(), 3, 1)
    eq = gen_getdown_equation(0, 1, 0, 1, 3, 1)
    assert X == u**3 - u or X == -(u**3 - u)
    vals = {"w": w, "u_b": u if X == u**3 - u else -u}
    assert eq.evaluate(vals).is_zero()


# -- D system -------------------------------------------------------------------

def test_d_system_shape():
    cs = build_constant_set(F3, 2, 0)
    sys = gen_d_system(3, 1, 1, cs)
    mus = [u for u in sys.unknowns if u.startswith("mu_")]
    pairs = {tuple(m.split("_")[1:5]) for m in mus}
    assert len(pairs) == 2
    assert len(mus) == 2 * 4
    assert mu_name(0, 0, 1, 0, 1, 0) in sys.unknowns
    u, v, lam = mp(F3, "u"), mp(F3, "v"), mp(F3, "lam1")
    assert sys.equations[0].expand() == v - u - lam**3 + lam
    with pytest.raises(TemplateError):
        gen_d_system(3, 1, 1, cs.subset(1))


# -- E / E2 -------------------------------------------------------------------

def test_e_system_clearing():
    sys = gen_e_system(3, 1)
    third = sys.equations[2].expand()
    at_zero = third.substitute({"x": RatFunc.const(F3, 0)})
    u = mp(F3, "u")
    t = const(F3, RatFunc.t(F3))
    assert at_zero == -u * t - t


def test_e2_requires_char_two():
    sys = gen_e2_system(0)
    assert sys.field.p == 2
    with pytest.raises(TemplateError):
        gen_e2_system(0, F=F3)


def test_full_pair_system_variants():
    assert gen_full_pk_pair_system(2, 1).meta["params"]["variant"] == "E2"
    sys = gen_full_pk_pair_system(3, 1)
    assert {"u1", "ut1", "v1", "vt1"} <= set(sys.unknowns)


# -- combiner -----------------------------------------------------------------

def test_combine_examples():
    F = F3
    X, Y = mp(F, "X"), mp(F, "Y")
    t = const(F, RatFunc.t(F))
    sys = EquationSystem(F, ["X"], [Equation.leaf(X - 1)])
    assert combine_to_single(sys) == X - 1
    sys = EquationSystem(F, ["X", "Y"], [Equation.leaf(X - 1), Equation.leaf(Y - 1)])
    f = combine_to_single(sys)
    assert f == (X - 1) ** 2 - t * (Y - 1) ** 2
    one = RatFunc.const(F, 1)
    assert f.evaluate({"X": one, "Y": one}).is_zero()
    for x, y in itertools.product(range(3), repeat=2):
        if (x, y) != (1, 1):
            assert not f.evaluate({"X": RatFunc.const(F, x), "Y": RatFunc.const(F, y)}).is_zero()
    g = combine_to_single(EquationSystem(F, ["X"], [Equation.leaf(X - 1), Equation.leaf(X - 1)]))
    assert g == (X - 1) ** 2 * (1 - t)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=3),
       st.integers(0, 2), st.integers(0, 2))
def test_fold_vanishes_iff_all_vanish(coeffs, x, y):
    F = F3
    X, Y = mp(F, "X"), mp(F, "Y")
    parts = [X * a + Y - b for a, b in coeffs]
    vals = {"X": RatFunc.const(F, x), "Y": RatFunc.const(F, y)}
    each = [pp.evaluate(vals).is_zero() for pp in parts]
    assert fold_polys(parts).evaluate(vals).is_zero() == all(each)


def test_combine_rejects_empty():
    with pytest.raises(ValueError):
        combine_to_single(EquationSystem(F3, [], []))


# -- serialization -----------------------------------------------------------

@pytest.mark.parametrize("build", [
    lambda: gen_e_system(3, 1),
    lambda: gen_e2_system(1),
    lambda: gen_d_system(3, 1, 1, build_constant_set(F3, 2, 0)),
    lambda: gen_pk_power_of_t_system(2, build_constant_set(gf(2, 2), 2, 0), compute_constants(2), clamp=2),
])
def test_serialization_round_trip(build):
    blob = serialize(build())
    assert serialize(parse(blob)) == blob


def test_parse_rejects_undeclared_unknown():
    data = json.loads(serialize(gen_e_system(3, 1)))
    data["equations"][0]["terms"][0]["m"] = {"z9": 1}
    with pytest.raises(ValueError):
        parse(json.dumps(data))


def test_parse_canonicalizes_coefficients():
    data = json.loads(serialize(gen_e_system(3, 1)))
    data["equations"][0]["terms"][0]["c"] = "(t^2+1)/(t)"
    sys = parse(json.dumps(data))
    coeffs = [c for _, c in sys.equations[0].expand().sorted_terms()]
    assert parse_ratfunc(F3, "(t^2+1)/t") in coeffs
    assert b'"(t^2 + 1)/(t)"' in serialize(sys)
