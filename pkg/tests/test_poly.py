import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import points, polys
from tropabp.lp import domination_lp, fast_domination, solve_lp
from tropabp.poly import (
    BudgetExceeded,
    TropPoly,
    canonicalize,
    distinguishing_point,
    dominates,
    format_poly,
    func_equal,
    parse_poly,
    poly_add,
    poly_eval,
    poly_mul,
    poly_pow,
    poly_substitute,
    separating_point,
)
from tropabp.semiring import INF, Mode

R, RP = Mode.R, Mode.RPLUS


def P(text):
    return parse_poly(text)[0]


def test_eval_examples():
    f = P("poly mode=r vars=x,y : x^2 ; y^2 ; x*y")
    assert poly_eval(f, (1, 3)) == 2
    assert poly_eval(TropPoly.empty(R, 2), (1, 2)) is INF
    assert poly_eval(TropPoly.constant(R, 1, 7), (INF,)) == 7


def test_eval_errors():
    f = P("poly mode=rplus vars=x : x")
    with pytest.raises(ValueError):
        poly_eval(f, (1, 2))
    with pytest.raises(ValueError):
        poly_eval(f, (-1,))


def test_add_examples():
    assert poly_add(P("poly mode=r vars=x : x ; 2"), P("poly mode=r vars=x : x ; 5")) == P("poly mode=r vars=x : x ; 2")
    f = P("poly mode=r vars=x,y : 3*x ; y ; x*y")
    assert poly_add(f, TropPoly.empty(R, 2)) == canonicalize(f)
    got = poly_add(P("poly mode=r vars=x,y : x*y"), P("poly mode=r vars=x,y : x^2 ; y^2"))
    assert got == P("poly mode=r vars=x,y : x^2 ; y^2")


def test_mul_examples():
    got = poly_mul(P("poly mode=r vars=x : x ; 1"), P("poly mode=r vars=x : x ; 3"))
    assert got.terms == {(2,): 0, (1,): 1, (0,): 4}
    f = P("poly mode=r vars=x,y : x ; 2*y")
    assert poly_mul(f, TropPoly.constant(R, 2, 0)) == canonicalize(f)
    assert poly_mul(f, TropPoly.empty(R, 2)).terms == {}


def test_mode_mismatch():
    with pytest.raises(ValueError):
        poly_add(P("poly mode=r vars=x : x"), P("poly mode=rplus vars=x : x"))
    with pytest.raises(ValueError):
        poly_mul(P("poly mode=r vars=x : x"), P("poly mode=r vars=x,y : x"))


def test_pow_examples():
    assert poly_pow(P("poly mode=r vars=x,y : x ; y"), 2) == P("poly mode=r vars=x,y : x^2 ; y^2")
    assert poly_pow(P("poly mode=r vars=x : x ; 3"), 0) == TropPoly.constant(R, 1, 0)
    # x+1 >= min(2x, 2) everywhere, so the middle term is absorbed.
    got = poly_pow(P("poly mode=r vars=x : x ; 1"), 2)
    assert got.terms == {(2,): 0, (0,): 2}
    for x in [Fraction(k, 4) for k in range(-20, 21)]:
        assert poly_eval(got, (x,)) == min(2 * x, x + 1, 2)


def test_dominates_examples():
    assert dominates(((1, 1), 0), [((2, 0), 0), ((0, 2), 0)], R)
    assert dominates(((1, 1), 0), [((1, 0), 0)], RP)
    assert not dominates(((1, 1), 0), [((1, 0), 0)], R)


def test_dominates_arity_mismatch():
    with pytest.raises(ValueError):
        dominates(((1, 1), 0), [((1,), 0)], R)


def test_canonicalize_examples():
    assert canonicalize(P("poly mode=r vars=x,y : x^2 ; y^2 ; x*y")) == P("poly mode=r vars=x,y : x^2 ; y^2")
    assert canonicalize(P("poly mode=rplus vars=x,y : x ; x*y")) == P("poly mode=rplus vars=x,y : x")
    f = P("poly mode=r vars=x,y : x ; x*y")
    assert canonicalize(f).terms == f.terms


def test_func_equal_examples():
    assert func_equal(poly_pow(P("poly mode=r vars=x,y : x ; y"), 2), P("poly mode=r vars=x,y : x^2 ; y^2"))
    assert not func_equal(P("poly mode=r vars=x,y : x"), P("poly mode=r vars=x,y : y"))
    power_sum = P("poly mode=r vars=x,y : x^3 ; y^3")
    assert func_equal(power_sum, poly_pow(P("poly mode=r vars=x,y : x ; y"), 3))


def test_text_format():
    f = P("poly mode=r vars=a,b : 3*a^2*b ; -1/2*b ; inf*a ; 4")
    assert f.terms == {(2, 1): 3, (0, 1): Fraction(-1, 2), (0, 0): 4}
    assert parse_poly(format_poly(f, ["a", "b"]))[0] == f
    with pytest.raises(ValueError):
        P("poly mode=r vars=x : y")
    with pytest.raises(ValueError):
        P("poly mode=rplus vars=x : -1*x")
    with pytest.raises(ValueError):
        P("poly vars=x : x")


def test_substitute():
    f = P("poly mode=r vars=x,y : x^2*y ; 3")
    g = poly_substitute(f, [("var", 0), ("const", 1)], 1)
    assert g.terms == {(2,): 1, (0,): 3}


def test_exact_lp_small():
    res = solve_lp([[1, 1]], [1], [2, 3])
    assert res.status == "optimal" and res.value == 2
    assert solve_lp([[1, 1], [1, 1]], [1, 2], [0, 0]).status == "infeasible"
    with pytest.raises(ValueError):
        solve_lp([[1, 1]], [-1], [0, 0])


# -- independent oracles ---------------------------------------------------------


def _grid(mode):
    lo = 0 if mode is RP else -10
    return [Fraction(k, 2) for k in range(2 * lo, 21)]


def _grid_refutes(cand, others, mode, arity):
    g = _grid(mode)
    for pt in itertools.product(g, repeat=arity):
        cv = cand[1] + sum(e * p for e, p in zip(cand[0], pt))
        if all(cv < c + sum(e * p for e, p in zip(ex, pt)) for ex, c in others):
            return True
    return False


@pytest.mark.parametrize("mode", [R, RP])
def test_domination_never_contradicts_grid(mode):
    rng = random.Random(7)
    lo = 0 if mode is RP else -4
    checked = 0
    for _ in range(120):
        arity = rng.randint(1, 2)
        mons = {}
        for _ in range(rng.randint(2, 5)):
            e = tuple(rng.randint(0, 4) for _ in range(arity))
            if sum(e) <= 4:
                mons[e] = rng.randint(lo, 4)
        items = list(mons.items())
        if len(items) < 2:
            continue
        cand, others = items[0], items[1:]
        if _grid_refutes(cand, others, mode, arity):
            checked += 1
            assert not dominates(cand, others, mode)
    assert checked > 10


@pytest.mark.parametrize("mode", [R, RP])
def test_fast_domination_matches_exact_simplex(mode):
    rng = random.Random(11)
    lo = 0 if mode is RP else -6
    for _ in range(300):
        arity = rng.randint(1, 3)
        others = [(tuple(rng.randint(0, 4) for _ in range(arity)), rng.randint(lo, 6)) for _ in range(rng.randint(1, 6))]
        cand = (tuple(rng.randint(0, 4) for _ in range(arity)), rng.randint(lo, 6))
        ok, witness = domination_lp(cand[0], cand[1], others, mode is RP)
        assert fast_domination(cand[0], cand[1], others, mode is RP) == ok
        if not ok:
            cv = cand[1] + sum(e * p for e, p in zip(cand[0], witness))
            assert all(cv < c + sum(e * p for e, p in zip(ex, witness)) for ex, c in others)
            if mode is RP:
                assert all(p >= 0 for p in witness)


@pytest.mark.parametrize("mode", [R, RP])
def test_fast_domination_large_instances_use_nearest_terms_soundly(mode):
    rng = random.Random(12)
    lo = 0 if mode is RP else -20
    seen = set()
    for _ in range(30):
        arity = rng.randint(2, 4)
        pool = [(tuple(rng.randint(0, 8) for _ in range(arity)), Fraction(rng.randint(lo, 40), rng.randint(1, 3))) for _ in range(150)]
        cand, others = pool[0], pool[1:]
        ok, _ = domination_lp(cand[0], cand[1], others, mode is RP)
        assert fast_domination(cand[0], cand[1], others, mode is RP) == ok
        seen.add(ok)
    assert seen == {True, False}


@pytest.mark.parametrize("mode", [R, RP])
def test_canonical_form_is_exactly_the_undominated_set(mode):
    rng = random.Random(3)
    lo = 0 if mode is RP else -5
    for _ in range(120):
        arity = rng.randint(1, 3)
        terms = {tuple(rng.randint(0, 4) for _ in range(arity)): rng.randint(lo, 5) for _ in range(rng.randint(1, 9))}
        f = TropPoly(mode, arity, terms)
        kept = canonicalize(f).terms
        for exp, c in kept.items():
            rest = [(e, v) for e, v in kept.items() if e != exp]
            if rest:
                assert not domination_lp(exp, c, rest, mode is RP)[0]
        for exp, c in f.terms.items():
            if exp not in kept:
                assert domination_lp(exp, c, list(kept.items()), mode is RP)[0]


# -- properties -------------------------------------------------------------------


@given(polys(), st.data())
def test_canonicalize_sound(f, data):
    g = canonicalize(f)
    for _ in range(5):
        pt = data.draw(points(f.mode, f.arity))
        assert poly_eval(f, pt) == poly_eval(g, pt)


@given(polys())
def test_canonicalize_idempotent(f):
    g = canonicalize(f)
    assert canonicalize(TropPoly(f.mode, f.arity, g.terms)) == g


@given(polys(mode=R, arity=2), polys(mode=R, arity=2), polys(mode=R, arity=2))
def test_func_equal_equivalence(f, g, h):
    assert func_equal(f, f)
    assert func_equal(f, g) == func_equal(g, f)
    if func_equal(f, g) and func_equal(g, h):
        assert func_equal(f, h)


@given(polys(arity=2, max_terms=4), st.data())
def test_mul_and_add_pointwise(f, data):
    g = data.draw(polys(mode=f.mode, arity=2, max_terms=4))
    pt = data.draw(points(f.mode, 2))
    a, b = poly_eval(f, pt), poly_eval(g, pt)
    s, m = poly_eval(poly_add(f, g), pt), poly_eval(poly_mul(f, g), pt)
    assert s == min(a, b)
    assert m == (INF if INF in (a, b) else a + b)


@given(polys(arity=2, max_terms=3, max_degree=2), st.integers(0, 3), st.data())
def test_pow_pointwise(f, ell, data):
    pt = data.draw(points(f.mode, 2))
    v = poly_eval(f, pt)
    want = 0 if ell == 0 else (INF if v is INF else ell * v)
    assert poly_eval(poly_pow(f, ell), pt) == want


@given(polys(mode=R, arity=2), polys(mode=R, arity=2))
def test_distinguishing_point_complete(f, g):
    pt = distinguishing_point(f, g)
    if func_equal(f, g):
        assert pt is None
    else:
        assert poly_eval(f, pt) != poly_eval(g, pt)


def test_separating_point_none_when_dominated():
    assert separating_point(((1, 1), 0), [((2, 0), 0), ((0, 2), 0)], R) is None
    pt = separating_point(((1, 1), -1), [((2, 0), 0), ((0, 2), 0)], R)
    assert pt is not None


def test_mul_budget():
    f = TropPoly(R, 2, {(i, 5 - i): 0 for i in range(6)})
    g = TropPoly(R, 2, {(i, 0): (i * i) % 7 for i in range(6)})
    with pytest.raises(BudgetExceeded):
        poly_mul(TropPoly(R, 2, {(i, j): 0 for i in range(8) for j in range(8)}), TropPoly(R, 2, {(i, 7 - i): 0 for i in range(8)}), max_terms=3)
    assert len(poly_mul(f, g)) >= 1
