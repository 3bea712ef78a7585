import random

import pytest
from hypothesis import given, settings, strategies as st

from h10ff import poly as P
from h10ff.fields import gf
from h10ff.integrality import (IntegralityError, TowerSpec, _sparse_search, check_norm_solvable_bruteforce,
                               compute_h, conjugate_product, construct_int_witness, coordinate_equations,
                               default_tower, divisor_mod_q_profile, gen_int_definition, gen_norm_form,
                               int_membership_witness, int_system, make_tower, norm_form_from_minpoly, norm_search,
                               pole_obstruction_at_zero_of_t, solve_norm_form_split, t_adic_sieve, verify_int)
from h10ff.linalg import SingularSystem
from h10ff.multipoly import MultiPoly
from h10ff.places import finite_place, ord_at
from h10ff.ratfunc import RatFunc, parse_ratfunc
from h10ff.solver import enumerate_ratfuncs

from oracles import sym_ord

F3 = gf(3)
T_PLACE = (0, 1)


def rf(text, F=F3):
    return parse_ratfunc(F, text)


# -- h_w ---------------------------------------------------------------------

def test_compute_h_examples():
    assert compute_h(rf("0"), 2) == rf("1/t^2")
    assert compute_h(rf("0"), 3) == rf("1/t^3")
    assert compute_h(rf("1/t"), 2) == rf("(1+t)/t^3")
    assert compute_h(rf("t"), 2) == rf("(t^3+1)/t^2")


def test_obstruction_examples():
    assert pole_obstruction_at_zero_of_t(rf("1/t"), 2)
    assert ord_at(compute_h(rf("1/t"), 2), finite_place(F3, T_PLACE)) == -3
    assert not pole_obstruction_at_zero_of_t(rf("t"), 2)
    assert ord_at(compute_h(rf("t"), 2), finite_place(F3, T_PLACE)) == -2
    for text in ("0", "1", "t+1", "t^2", "(t+1)/(t+2)"):
        assert not pole_obstruction_at_zero_of_t(rf(text), 2)


def test_dichotomy_exhaustive_against_sympy():
    for w in enumerate_ratfuncs(F3, 2):
        h = compute_h(w, 2)
        o = sym_ord(h.num, h.den, T_PLACE, 3)
        pole = (not w.is_zero()) and sym_ord(w.num, w.den, T_PLACE, 3) < 0
        assert (o % 2 != 0) == pole, str(w)
        assert pole_obstruction_at_zero_of_t(w, 2) == pole


def test_profile_examples():
    t_pl = finite_place(F3, T_PLACE)
    prof = divisor_mod_q_profile(rf("t+1"), 2)
    assert all(r == 0 for pl, r in prof.items() if pl != t_pl)
    assert divisor_mod_q_profile(rf("1/t"), 2)[t_pl] == 1
    assert set(divisor_mod_q_profile(rf("0"), 2)) == {t_pl}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_profile_vanishes_away_from_t(p):
    F = gf(p)
    t_pl = finite_place(F, T_PLACE)
    for w in enumerate_ratfuncs(F, 2 if p < 5 else 1):
        prof = divisor_mod_q_profile(w, 2)
        assert all(r == 0 for pl, r in prof.items() if pl != t_pl), str(w)


# -- towers and norm forms ------------------------------------------------

def test_default_towers():
    ts3 = default_tower(3)
    assert (ts3.branch, ts3.q, ts3.a) == ("q!=p", 2, 2)
    ts2 = default_tower(2)
    assert (ts2.branch, ts2.q, ts2.a) == ("q=p", 2, 1)
    for p in (3, 5, 7, 11, 13):
        ts = default_tower(p)
        f = P.trim(c.const_value() for c in ts.alpha_min())
        assert P.is_irreducible(ts.field, f)
        # the chosen a is the least one making alpha's polynomial irreducible
        for smaller in range(1, ts.a):
            assert not P.is_irreducible(ts.field, P.trim([ts.field.neg(smaller), 0, 1]))


def test_tower_requires_roots_of_unity():
    with pytest.raises(IntegralityError):
        make_tower(gf(5), 3)
    with pytest.raises(IntegralityError):
        make_tower(gf(7), 5)


def test_reducible_alpha_is_rejected():
    ts = TowerSpec(2, F3, 1, 2)  # T^2 - 1 splits
    with pytest.raises(IntegralityError):
        gen_norm_form(ts)


def test_quadratic_norm_form_is_a0_sq_minus_D_a1_sq():
    F = F3
    a0, a1 = MultiPoly.var(F, "a0"), MultiPoly.var(F, "a1")
    nf = gen_norm_form(default_tower(3))
    assert nf.P == a0**2 - 2 * a1**2
    hinv = MultiPoly.var(F, "hinv")
    sym = norm_form_from_minpoly(F, [-(hinv + 1), MultiPoly.zero(F), MultiPoly.const(F, 1)], 2)
    assert sym.P == a0**2 - (hinv + 1) * a1**2
    assert sym.P.substitute({"a1": RatFunc.const(F, 0)}) == a0**2


def test_artin_schreier_quadratic_norm_form():
    F = gf(2)
    nf = gen_norm_form(default_tower(2))
    a0, a1 = MultiPoly.var(F, "a0"), MultiPoly.var(F, "a1")
    # conjugates alpha and alpha + 1 with alpha^2 = alpha + 1
    assert nf.P == a0**2 + a0 * a1 + a1**2


def test_cubic_norm_form_matches_conjugate_product():
    F = gf(7)
    ts = make_tower(F, 3)
    xi = ts.xi
    D = MultiPoly.var(F, "D")
    nf = norm_form_from_minpoly(F, [-D, MultiPoly.zero(F), MultiPoly.zero(F), MultiPoly.const(F, 1)], 3)
    rng = random.Random(5)
    for _ in range(25):
        alpha = RatFunc(F, P.trim([rng.randrange(7) for _ in range(3)]) or (1,), P.trim([rng.randrange(1, 7)]))
        coords = [RatFunc(F, P.trim([rng.randrange(7) for _ in range(3)])) for _ in range(3)]
        conj = [alpha * RatFunc.const(F, F.pow(xi, j)) for j in range(3)]
        vals = {"a0": coords[0], "a1": coords[1], "a2": coords[2], "D": alpha**3}
        assert nf.P.evaluate(vals) == conjugate_product(coords, conj)


def test_solve_norm_form_split_examples():
    F = F3
    one, two = RatFunc.const(F, 1), RatFunc.const(F, 2)
    y = rf("t^2+1")
    a = solve_norm_form_split(y, [one, two])
    assert a == ((y + 1) / 2, (y - 1) / 2)
    assert a[0] ** 2 - a[1] ** 2 == y
    a = solve_norm_form_split(one, [one, two])
    assert a == (one, RatFunc.const(F, 0))
    with pytest.raises(SingularSystem):
        solve_norm_form_split(y, [one, one])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4), st.integers(1, 6))
def test_cubic_split_solve(num, den):
    F = gf(7)
    xi = make_tower(F, 3).xi
    y = RatFunc(F, P.trim(num) or (1,), (den,))
    alphas = [RatFunc.const(F, F.pow(xi, j)) for j in range(3)]
    a = solve_norm_form_split(y, alphas)
    assert conjugate_product(a, alphas) == y


# -- the INT system -----------------------------------------------------------

def test_int_system_shape():
    sys = gen_int_definition(default_tower(3))
    coords = [u for u in sys.unknowns if u.startswith("a")]
    assert len(coords) == 2 * 2 * 2
    assert {"w", "hinv"} <= set(sys.unknowns)
    assert len(sys.unknowns) == 10
    assert sys.meta["params"]["tower"]["branch"] == "q!=p"
    assert len(sys.meta["params"]["basis"]) == 4


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_constructed_witness_for_powers_of_t(p, n):
    F = gf(p)
    ts = default_tower(p)
    w = RatFunc.tpow(F, n)
    asg = construct_int_witness(w, ts)
    assert asg is not None
    assert asg["w"] == w
    assert verify_int(w, ts, asg).ok


@pytest.mark.parametrize("text", ["0", "1", "t+1", "t^2+2", "1/(t+1)", "(t^2+1)/(t+2)"])
def test_constructed_witness_for_integral_values(text):
    ts = default_tower(3)
    w = rf(text)
    asg = construct_int_witness(w, ts)
    assert asg is not None and verify_int(w, ts, asg).ok


def test_obstructed_values_have_no_constructed_witness():
    ts = default_tower(3)
    for text in ("1/t", "1/t^2", "(t+1)/t"):
        assert construct_int_witness(rf(text), ts) is None


def test_membership_witness_reports_method():
    asg, how = int_membership_witness(rf("t"), default_tower(3))
    assert how == "constructed" and asg is not None


# -- bounded search and the sieve ---------------------------------------------

def test_norm_search_examples():
    ts = default_tower(3)
    assert check_norm_solvable_bruteforce(rf("1/t"), ts, 0) is None
    assert check_norm_solvable_bruteforce(rf("1/t"), ts, 1) is None
    rep0 = norm_search(rf("0"), ts, 0)
    assert rep0.witness is None
    rep1 = norm_search(rf("0"), ts, 1)
    assert rep1.witness is not None and verify_int(rf("0"), ts, rep1.witness).ok
    found = check_norm_solvable_bruteforce(rf("t"), ts, 1)
    assert found is not None and verify_int(rf("t"), ts, found).ok


def test_bound_zero_searches_constants_only():
    ts = default_tower(3)
    rep = norm_search(rf("t"), ts, 0)
    if rep.witness is not None:
        assert all(v.is_const() for k, v in rep.witness.items() if k.startswith("a"))


def _exhaust_constants(w, ts):
    names, eqs = coordinate_equations(w, ts)
    values = [RatFunc.const(ts.field, c) for c in range(1, ts.field.q)]
    found, _, exhausted = _sparse_search(names, eqs, values, 10**9)
    assert exhausted
    return found


@pytest.mark.parametrize("text", ["1/t", "1/t^2", "(t+1)/t", "2/(t^2+t)", "t", "0", "t+1"])
def test_sieve_refutation_is_sound_at_bound_zero(text):
    ts = default_tower(3)
    w = rf(text)
    names, eqs = coordinate_equations(w, ts)
    res = t_adic_sieve(ts.field, names, eqs, 0)
    if res.refuted:
        assert _exhaust_constants(w, ts) is None


def test_obstructed_sample_refuted_at_bound_two():
    ts = default_tower(3)
    for text in ("1/t", "2/t", "(t+1)/t", "1/t^2", "(t^2+1)/t"):
        w = rf(text)
        assert pole_obstruction_at_zero_of_t(w, 2)
        rep = norm_search(w, ts, 2)
        assert rep.witness is None and rep.method == "t-adic sieve"


def test_int_system_is_cached():
    ts = default_tower(3)
    assert int_system(ts) is int_system(ts)
