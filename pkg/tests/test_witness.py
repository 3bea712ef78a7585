import random

import pytest
from hypothesis import given, settings, strategies as st

from h10ff import poly as P
from h10ff.fields import gf
from h10ff.multipoly import MultiPoly
from h10ff.ratfunc import RatFunc, parse_ratfunc
from h10ff.system import Equation, EquationSystem
from h10ff.templates import (build_constant_set, compute_constants, gen_d_system, gen_e2_system, gen_e_system,
                             gen_full_pk_pair_system, gen_pk_power_of_t_system)
from h10ff.witness import (WitnessError, artin_schreier_witness, assignment_from_json, assignment_to_json,
                           build_d_system_witness, build_e_single_witness, build_e_witness, build_pk_power_witness,
                           lies_in_constant_subfield, verify_assignment)

F3 = gf(3)
t3 = RatFunc.t(F3)


@st.composite
def small_ratfuncs(draw, p):
    F = gf(p)
    num = P.trim(draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=3)))
    den = P.trim(draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=3))) or (1,)
    return RatFunc(F, num, den)


# -- Artin-Schreier ------------------------------------------------------------

def test_artin_schreier_examples():
    x = t3
    assert artin_schreier_witness(x, 3, 0).is_zero()
    assert artin_schreier_witness(x, 3, 1) == x
    v = artin_schreier_witness(x, 3, 2)
    assert v == t3**3 + t3
    assert v**3 - v == t3**9 - t3


@pytest.mark.parametrize("p", [2, 3, 5])
@settings(max_examples=40, deadline=None)
@given(data=st.data(), s=st.integers(0, 3))
def test_artin_schreier_identity(p, data, s):
    x = data.draw(small_ratfuncs(p))
    pa = p**2 if p == 2 else p
    v = artin_schreier_witness(x, pa, s)
    assert v**pa - v == x ** (pa**s) - x


# -- pk power of t -----------------------------------------------------------

@pytest.mark.parametrize("p,k", [(3, 1), (2, 2)])
@pytest.mark.parametrize("s", [0, 1, 2])
def test_pk_power_witness(p, k, s):
    F = gf(p, k)
    cs = build_constant_set(F, 2, 0)
    cons = compute_constants(p)
    sys = gen_pk_power_of_t_system(p, cs, cons, clamp=2)
    asg = build_pk_power_witness(p, s, cs, sys)
    assert verify_assignment(sys, asg).ok
    assert asg["w"] == RatFunc.tpow(F, p ** (cons.a * s))
    assert lies_in_constant_subfield(asg, cs)
    if s == 0:
        assert all(v.is_zero() for k_, v in asg.items() if k_ != "w")


def test_pk_power_witness_values():
    cs = build_constant_set(F3, 2, 0)
    sys = gen_pk_power_of_t_system(3, cs, compute_constants(3), clamp=2)
    asg = build_pk_power_witness(3, 1, cs, sys)
    assert (asg["w"], asg["v"], asg["u"]) == (t3**3, t3, t3.inverse())
    F4 = gf(2, 2)
    cs4 = build_constant_set(F4, 2, 0)
    sys4 = gen_pk_power_of_t_system(2, cs4, compute_constants(2), clamp=2)
    asg4 = build_pk_power_witness(2, 1, cs4, sys4)
    t = RatFunc.t(F4)
    assert asg4["w"] == t**4
    assert asg4["v"] ** 4 - asg4["v"] == t**4 - t


def test_perturbation_is_violated():
    cs = build_constant_set(F3, 2, 0)
    sys = gen_pk_power_of_t_system(3, cs, compute_constants(3), clamp=2)
    asg = build_pk_power_witness(3, 1, cs, sys)
    for name in ("w", "u", "v"):
        bad = dict(asg)
        # +1 would be invisible to x^3 - x over F_3
        bad[name] = bad[name] + t3
        assert verify_assignment(sys, bad).kind == "Violated"


def test_spurious_denominator():
    F = F3
    x = MultiPoly.var(F, "x")
    # x*(x-1) = 0 obtained from (x-1) = 0 after clearing the denominator 1/x
    sys = EquationSystem(F, ["x"], [Equation.leaf(x * (x - 1), [x])])
    assert verify_assignment(sys, {"x": RatFunc.const(F, 0)}).kind == "SpuriousDenominator"
    assert verify_assignment(sys, {"x": RatFunc.const(F, 1)}).ok


def test_missing_unknown_is_an_error():
    sys = gen_e_system(3, 1)
    with pytest.raises(WitnessError):
        verify_assignment(sys, {"u": t3})


# -- D system -------------------------------------------------------------------

@pytest.mark.parametrize("p,k", [(3, 1), (2, 2)])
@pytest.mark.parametrize("s", [0, 1, 2])
def test_d_system_witness(p, k, s):
    F = gf(p, k)
    cs = build_constant_set(F, 2, 0)
    a = compute_constants(p).a
    sys = gen_d_system(p, a, s, cs)
    t = RatFunc.t(F)
    for u in (t, t + 1):
        asg = build_d_system_witness(u, p, a, s, cs, sys)
        assert verify_assignment(sys, asg).ok
        if s == 0:
            assert asg["v"] == u
            assert all(asg[n].is_zero() for n in sys.unknowns if n.startswith(("mu_", "sigma_", "lam")))


def test_d_system_witness_rejects_shift_pole():
    cs = build_constant_set(F3, 2, 0)
    sys = gen_d_system(3, 1, 1, cs)
    with pytest.raises(WitnessError):
        build_d_system_witness(RatFunc.const(F3, 2), 3, 1, 1, cs, sys)  # u + 1 = 0
    with pytest.raises(WitnessError):
        build_d_system_witness(RatFunc.const(F3, 0), 3, 1, 1, cs, sys)


# -- E / E2 ---------------------------------------------------------------------

def test_e_witness_examples():
    x = t3 + 1
    asg = build_e_witness(x, 3, 1)
    assert asg["v"] == asg["u"] ** 3
    assert verify_assignment(gen_full_pk_pair_system(3, 1), asg).ok
    c = build_e_witness(RatFunc.const(F3, 2), 3, 1)
    # u is forced by u (x^3 - t) = x^3 + t, so constant x still gives a nonconstant u
    assert c["u"] == (RatFunc.const(F3, 2) + t3) / (RatFunc.const(F3, 2) - t3)
    assert c["y"] == RatFunc.const(F3, 2)
    assert verify_assignment(gen_full_pk_pair_system(3, 1), c).ok
    F2 = gf(2)
    asg2 = build_e_witness(RatFunc.t(F2) + 1, 2, 1)
    assert verify_assignment(gen_full_pk_pair_system(2, 1), asg2).ok
    e2 = build_e_single_witness(RatFunc.t(F2) + 1, 2, 0)
    assert e2["v"] == e2["u"]
    assert verify_assignment(gen_e2_system(0), e2).ok


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("s", [0, 1, 2])
def test_e_witness_random(p, s):
    rng = random.Random(p * 10 + s)
    F = gf(p)
    sys = gen_full_pk_pair_system(p, s)
    done = 0
    while done < 4:
        num = P.trim([rng.randrange(p) for _ in range(3)])
        den = P.trim([rng.randrange(p) for _ in range(2)]) or (1,)
        x = RatFunc(F, num, den)
        try:
            asg = build_e_witness(x, p, s)
        except WitnessError:
            continue
        assert verify_assignment(sys, asg).ok
        done += 1


def test_e_witness_wrong_partner_fails():
    asg = build_e_witness(t3, 3, 1)
    asg["y"] = t3 + 1
    assert not verify_assignment(gen_full_pk_pair_system(3, 1), asg).ok


def test_assignment_json_round_trip():
    asg = build_e_witness(t3 + 1, 3, 1)
    assert assignment_from_json(F3, assignment_to_json(asg)) == asg
