import json

import pytest
from hypothesis import given, settings, strategies as st

from h10ff.fields import gf
from h10ff.multipoly import MultiPoly
from h10ff.ratfunc import RatFunc
from h10ff.solver import (SearchBounds, base_pair_witness_search, check_pk_power_theorem, count_ratfuncs,
                          enumerate_ratfuncs, is_frobenius_power_of_t, parse_bounds, solve_bounded)
from h10ff.system import Equation, EquationSystem
from h10ff.templates import gen_e_system
from h10ff.witness import build_e_single_witness, verify_assignment

from oracles import raw_ratfunc_count

F2, F3 = gf(2), gf(3)


def var(F, n):
    return MultiPoly.var(F, n)


def cst(F, x):
    return MultiPoly.const(F, x if isinstance(x, RatFunc) else RatFunc.const(F, x))


# -- enumeration ---------------------------------------------------------------

def test_enumeration_examples():
    assert list(enumerate_ratfuncs(F2, 0)) == [RatFunc.const(F2, 0), RatFunc.const(F2, 1)]
    assert [x.const_value() for x in enumerate_ratfuncs(F3, 0)] == [0, 1, 2]


@pytest.mark.parametrize("p,H", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
def test_enumeration_count_matches_raw_pairs(p, H):
    F = gf(p)
    items = list(enumerate_ratfuncs(F, H))
    assert len(items) == len(set(items)) == count_ratfuncs(F, H) == raw_ratfunc_count(p, H)
    assert all(x.height() <= H for x in items if not x.is_zero())


def test_enumeration_order_is_stable():
    a = [str(x) for x in enumerate_ratfuncs(F3, 2)]
    b = [str(x) for x in enumerate_ratfuncs(F3, 2)]
    assert a == b
    heights = [0 if x.is_zero() else x.height() for x in enumerate_ratfuncs(F3, 2)]
    assert heights == sorted(heights)


# -- bounds ---------------------------------------------------------------------

def test_parse_bounds():
    b = parse_bounds(F3, "w:2,u:4,v:4")
    assert b.heights == {"w": 2, "u": 4, "v": 4}
    b = parse_bounds(F3, "w:@tpowers(3),*:1")
    assert b.whitelist["w"] == [RatFunc.tpow(F3, n) for n in (1, 2, 3)]
    assert b.default == 1
    for bad in ("w", "w:x", "w:@nope", "w:-1"):
        with pytest.raises(ValueError):
            parse_bounds(F3, bad)


# -- bounded search ----------------------------------------------------------------

def test_solve_examples():
    w = var(F3, "w")
    sys = EquationSystem(F3, ["w"], [Equation.leaf(w - cst(F3, RatFunc.t(F3)))])
    rep = solve_bounded(sys, SearchBounds.uniform(["w"], 1))
    assert [s["w"] for s in rep.solutions] == [RatFunc.t(F3)]
    assert rep.complete

    sys = EquationSystem(F3, ["w"], [Equation.leaf(w), Equation.leaf(w - 1)])
    rep = solve_bounded(sys, SearchBounds.uniform(["w"], 1))
    assert rep.solutions == []
    assert sum(rep.histogram.values()) == count_ratfuncs(F3, 1)


def test_e_system_search_recovers_constructed_witness():
    t = RatFunc.t(F3)
    full = gen_e_system(3, 1)
    # fix x = t, leaving u and ut pinned by one-unknown equations
    sys = EquationSystem(F3, [u for u in full.unknowns if u != "x"],
                         [eq.substitute({"x": t}) for eq in full.equations])
    # u = (t^2+1)/(t^2-1) and ut = (t^4+1)/(t^4-1); v and vt range over cubes of those domains
    bounds = SearchBounds(
        heights={"u": 2, "ut": 4},
        whitelist={"y": [RatFunc.tpow(F3, n) for n in (1, 2, 3)],
                   "v": [x**3 for x in enumerate_ratfuncs(F3, 2)],
                   "vt": [x**3 for x in enumerate_ratfuncs(F3, 4)]},
    )
    rep = solve_bounded(sys, bounds)
    expected = build_e_single_witness(t, 3, 1)
    del expected["x"]
    assert rep.complete and rep.solutions == [expected]


@st.composite
def tiny_systems(draw):
    F = F2
    names = ["x", "y"]
    eqs = []
    for _ in range(draw(st.integers(1, 2))):
        c = [RatFunc(F, (draw(st.integers(0, 1)), draw(st.integers(0, 1)))) for _ in range(4)]
        x, y = var(F, "x"), var(F, "y")
        eqs.append(Equation.leaf(cst(F, c[0]) * x * y + cst(F, c[1]) * x + cst(F, c[2]) * y + cst(F, c[3])))
    return EquationSystem(F, names, eqs)


@settings(max_examples=40, deadline=None)
@given(tiny_systems())
def test_pruning_never_drops_solutions(sys):
    bounds = SearchBounds.uniform(sys.unknowns, 1)
    pruned = solve_bounded(sys, bounds)
    flat = solve_bounded(sys, bounds, prune=False)
    key = lambda s: tuple(str(s[u]) for u in sys.unknowns)
    assert sorted(pruned.solutions, key=key) == sorted(flat.solutions, key=key)
    assert all(verify_assignment(sys, s).ok for s in pruned.solutions)


def test_reports_are_deterministic():
    sys = gen_e_system(3, 0)
    bounds = SearchBounds.uniform(sys.unknowns, 0)
    a = json.dumps(solve_bounded(sys, bounds).to_json(), sort_keys=True)
    b = json.dumps(solve_bounded(sys, bounds).to_json(), sort_keys=True)
    assert a == b


def test_candidate_budget_marks_incomplete():
    w = var(F3, "w")
    sys = EquationSystem(F3, ["w"], [Equation.leaf(w - cst(F3, RatFunc.tpow(F3, 5)))])
    rep = solve_bounded(sys, SearchBounds.uniform(["w"], 2), max_candidates=10)
    assert not rep.complete and rep.candidates == 10


# -- the power-of-t sweep --------------------------------------------------------

def test_frobenius_power_recognizer():
    assert is_frobenius_power_of_t(RatFunc.t(F3), 3)
    assert is_frobenius_power_of_t(RatFunc.tpow(F3, 9), 3)
    assert not is_frobenius_power_of_t(RatFunc.tpow(F3, 2), 3)
    assert not is_frobenius_power_of_t(RatFunc.t(F3) + 1, 3)


def test_base_pair_lookup_examples():
    t = RatFunc.t(F3)
    assert base_pair_witness_search(t + 1, 3, 2) is None
    found = base_pair_witness_search(t**3, 3, 2)
    assert found is not None and found["v"] ** 3 - found["v"] == t**3 - t


def test_base_pair_lookup_agrees_with_product_search():
    # the decoupled lookup and the general solver agree on the base pair
    from h10ff.templates import base_pair_equations

    t = RatFunc.t(F2)
    for w in list(enumerate_ratfuncs(F2, 1))[2:]:
        sys = EquationSystem(F2, ["w", "u", "v"], base_pair_equations(F2, 4))
        bounds = SearchBounds({"u": 2, "v": 2}, {"w": [w]})
        rep = solve_bounded(sys, bounds, max_solutions=1)
        lookup = base_pair_witness_search(w, 4, 2)
        assert (rep.solutions != []) == (lookup is not None), str(w)
    assert base_pair_witness_search(t**4, 4, 1) is not None


def test_small_sweep():
    rep = check_pk_power_theorem(3, 1, 2)
    assert rep.witnessed == [str(RatFunc.t(F3))]
    assert rep.unexpected == []
    assert rep.constants_excluded == 3
    assert rep.refuted == count_ratfuncs(F3, 1) - 3 - 1
