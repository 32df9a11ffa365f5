import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropabp import corpus
from tropabp.models import Abp, CircuitBuilder, Edge, Var, alternation_profile, depth, expand, model_eval, stats, validate
from tropabp.poly import TropPoly, canonicalize, func_equal, parse_poly
from tropabp.semiring import INF, Mode
from tropabp.transforms import (
    abp_to_alt_formula,
    abp_width_reduce,
    alt_formula_to_abp,
    bivariate_to_width2,
    brent_depth_reduce,
    factor_formula,
    factor_product,
    normalize_alternating,
    parse_pass,
    q_add,
    q_atom,
    q_read,
    q_sum_atoms,
    q_wrap,
    run_pass,
    univariate_factor,
    univariate_to_width2,
)
from tropabp.transforms.brent import depth_bound, split_node
from tropabp.transforms.report import levels_needed
from tropabp.transforms.width2 import bridge_size_bound, pareto_monomials

R, RP = Mode.R, Mode.RPLUS
FIG_POLY = "poly mode=r vars=x : x^4 ; 2*x^2 ; 4*x ; 7"


def P(text):
    return parse_poly(text)[0]


def same(m, target):
    t = target if isinstance(target, TropPoly) else expand(target)
    return func_equal(expand(m), t)


def left_comb(n, mode=RP):
    b = CircuitBuilder(mode, n)
    acc = b.var(0)
    for i in range(1, n):
        acc = b.mul(acc, b.var(i))
    return b.build_formula(acc)


# -- depth reduction -------------------------------------------------------------


def test_brent_left_comb():
    f = left_comb(8)
    assert len(f.nodes) == 15
    g = brent_depth_reduce(f)
    assert depth(g) <= depth_bound(15)
    assert same(g, f)


def test_brent_shallow_unchanged():
    b = CircuitBuilder(RP, 3)
    f = b.build_formula(b.add(b.mul(b.var(0), b.var(1)), b.var(2)))
    assert same(brent_depth_reduce(f), f)


def test_brent_rejects_r():
    with pytest.raises(ValueError):
        brent_depth_reduce(left_comb(4, R))


def test_split_node_walks_heavy_child():
    f = left_comb(30)
    v = split_node(f)
    sub = len(brent_depth_reduce.__globals__["_extract"](f, v).nodes)
    assert 3 * sub <= 2 * len(f.nodes)


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_brent_absorption_identity(seed):
    rng = random.Random(seed)
    f = corpus.random_deep_formula(rng, RP, 3, rng.randint(220, 300))
    trace = []
    g = brent_depth_reduce(f, trace)
    assert trace
    for b_part, fv in trace:
        for _ in range(5):
            pt = corpus.random_point(rng, RP, 3, 0, 10)
            bv, vv = model_eval(b_part, pt), model_eval(fv, pt)
            combined = min(bv, INF if INF in (bv, vv) else bv + vv)
            assert combined == bv
    for _ in range(10):
        pt = corpus.random_point(rng, RP, 3, 0, 10)
        assert model_eval(g, pt) == model_eval(f, pt)


def test_brent_random_within_bound():
    rng = random.Random(2)
    for _ in range(10):
        f = corpus.random_formula(rng, RP, 4, rng.randint(20, 200))
        g = brent_depth_reduce(f)
        assert depth(g) <= depth_bound(len(f.nodes))
        assert same(g, f)


# -- alternating formulas -----------------------------------------------------------


def test_normalize_profiles():
    b = CircuitBuilder(R, 6)
    f = b.build_formula(b.sum([b.mul(b.var(i), b.var(i + 3)) for i in range(3)]))
    assert normalize_alternating(f, 1).level_profile == (2, 3)
    b = CircuitBuilder(R, 1)
    g = normalize_alternating(b.build_formula(b.var(0)), 1)
    assert g.level_profile == (1, 1) and validate(g) == []
    assert same(g, b.build_formula(b.var(0)))


def test_normalize_depth3_to_p2():
    b = CircuitBuilder(R, 4)
    f = b.build_formula(b.mul(b.add(b.mul(b.var(0), b.var(1)), b.var(2)), b.var(3)))
    g = normalize_alternating(f, 2)
    assert len(g.level_profile) == 4
    assert same(g, f)


def test_normalize_too_deep():
    rng = random.Random(1)
    f = corpus.random_alternating_formula(rng, R, 3, 3, 200)
    with pytest.raises(ValueError):
        normalize_alternating(f, 1)


def test_alt_to_abp_inner_product():
    b = CircuitBuilder(R, 6)
    f = b.build_formula(b.sum([b.mul(b.var(i), b.var(i + 3)) for i in range(3)]))
    a = alt_formula_to_abp(normalize_alternating(f, 1))
    assert a.width == 3
    assert same(a, f)


def test_alt_to_abp_single_product():
    b = CircuitBuilder(R, 2)
    f = b.build_formula(b.mul(b.var(0), b.var(1)))
    a = alt_formula_to_abp(normalize_alternating(f, 1))
    assert a.width == 3 and same(a, f)


def test_alt_to_abp_requires_profile():
    with pytest.raises(ValueError):
        alt_formula_to_abp(left_comb(3, R))


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_alt_to_abp_random(seed, p):
    rng = random.Random(seed)
    f = corpus.random_alternating_formula(rng, R, 3, p, 60)
    a = alt_formula_to_abp(normalize_alternating(f, p))
    assert a.width == 2 * p + 1
    assert stats(a)["size"] <= 10 * p * len(f.nodes)
    assert same(a, f)


# -- ABP to formula, width reduction -------------------------------------------------


def test_abp_to_formula_p1_three_layers():
    rng = random.Random(4)
    a = corpus.random_abp(rng, R, 3, 3, 2)
    g = abp_to_alt_formula(a, 1)
    assert len(alternation_profile(g)) <= 2 and same(g, a)


def test_abp_to_formula_p2_five_layers():
    rng = random.Random(6)
    a = corpus.random_abp(rng, R, 3, 5, 2)
    g = abp_to_alt_formula(a, 2)
    assert len(alternation_profile(g)) <= 4 and same(g, a)


def test_abp_to_formula_univariate_ladder():
    f = P(FIG_POLY)
    assert same(abp_to_alt_formula(univariate_to_width2(f), 2), f)


def test_width_reduce_width4():
    rng = random.Random(8)
    a = corpus.random_abp(rng, R, 3, 3, 4)
    while a.width < 4:
        a = corpus.random_abp(rng, R, 3, 3, 4)
    out = abp_width_reduce(a, 1)
    assert out.width == 3 and same(out, a)


def test_width_reduce_already_narrow():
    a = univariate_to_width2(P(FIG_POLY))
    out = abp_width_reduce(a, 1)
    assert out.width == 3 and same(out, a)


# -- width 2 --------------------------------------------------------------------------


def test_bivariate_three_bridges():
    f = P("poly mode=rplus vars=x,y : x^3 ; x*y ; y^2")
    a = bivariate_to_width2(f)
    assert a.width == 2 and same(a, f)
    assert pareto_monomials(f) == [(3, 0), (1, 1), (0, 2)]


def test_bivariate_single_monomial():
    f = P("poly mode=rplus vars=x,y : x^3")
    a = bivariate_to_width2(f)
    assert [e.label for e in a.edges] == [Var(0)] * 3
    assert a.width == 2 and same(a, f)


def test_bivariate_absorption():
    f = P("poly mode=rplus vars=x,y : x^2*y ; x^2*y^3")
    assert pareto_monomials(f) == [(2, 1)]
    assert same(bivariate_to_width2(f), f)


def test_bivariate_errors():
    with pytest.raises(ValueError):
        bivariate_to_width2(P("poly mode=rplus vars=x,y : 1*x"))
    with pytest.raises(ValueError):
        bivariate_to_width2(P("poly mode=r vars=x,y : x"))
    with pytest.raises(ValueError):
        bivariate_to_width2(P("poly mode=rplus vars=x : x"))


@given(st.integers(0, 10**6))
def test_bivariate_random(seed):
    rng = random.Random(seed)
    d = rng.randint(0, 30)
    terms = {}
    for _ in range(rng.randint(1, 12)):
        i = rng.randint(0, d)
        terms[(i, rng.randint(0, d - i))] = 0
    f = TropPoly(RP, 2, terms)
    a = bivariate_to_width2(f)
    assert a.width == 2
    assert stats(a)["size"] <= bridge_size_bound(f)
    assert same(a, f)


def test_univariate_examples():
    f = P(FIG_POLY)
    a = univariate_to_width2(f)
    assert a.width == 2 and same(a, f)
    c = univariate_to_width2(P("poly mode=r vars=x : 7"))
    assert len(c.edges) == 1
    assert len(univariate_to_width2(P("poly mode=r vars=x : x")).layers) == 2
    with pytest.raises(ValueError):
        univariate_to_width2(P("poly mode=r vars=x,y : x"))


@given(st.integers(0, 10**6), st.sampled_from([R, RP]))
def test_univariate_random(seed, mode):
    rng = random.Random(seed)
    f = corpus.random_poly(rng, mode, 1, rng.randint(0, 12), rng.randint(1, 8))
    a = univariate_to_width2(f)
    assert a.width <= 2
    assert len(a.layers) <= f.degree() + 2
    assert same(a, f)


# -- factoring ----------------------------------------------------------------------------


def test_factor_four_term_polynomial():
    f = P(FIG_POLY)
    fac = univariate_factor(f)
    assert fac.roots == ((1, 2), (2, 1), (3, 1))
    assert func_equal(factor_product(fac), f)
    assert same(factor_formula(fac), f)


def test_factor_linear():
    fac = univariate_factor(P("poly mode=r vars=x : x ; 3"))
    assert fac.roots == ((3, 1),)


def test_factor_double_root():
    f = P("poly mode=r vars=x : x^2 ; 0")
    fac = univariate_factor(f)
    assert fac.roots == ((0, 2),)
    assert func_equal(factor_product(fac), f)


def test_factor_errors():
    with pytest.raises(ValueError):
        univariate_factor(P("poly mode=r vars=x,y : x"))
    with pytest.raises(ValueError):
        univariate_factor(TropPoly.empty(R, 1))
    with pytest.raises(ValueError):
        univariate_factor(P("poly mode=rplus vars=x : x"))


@given(st.integers(0, 10**6))
def test_factor_random(seed):
    rng = random.Random(seed)
    f = corpus.random_poly(rng, R, 1, rng.randint(0, 10), rng.randint(1, 6))
    fac = univariate_factor(f)
    assert sum(m for _, m in fac.roots) == fac.degree - fac.low_power
    assert factor_product(fac) == canonicalize(f)


# -- Q format ------------------------------------------------------------------------------


def test_q_add_two_atoms():
    a = q_add(q_atom(R, 2, Var(0)), q_atom(R, 2, Var(1)))
    assert same(q_read(a), P("poly mode=r vars=a,b : a ; b"))


def test_q_add_identity():
    from tropabp.models import Const

    a = q_add(q_atom(R, 1, Var(0)), q_atom(R, 1, Const(INF)))
    assert same(q_read(a), P("poly mode=r vars=x : x"))


def test_q_chain_five():
    a = q_sum_atoms(R, 5, [Var(i) for i in range(5)])
    assert same(q_read(a), P("poly mode=r vars=a,b,c,d,e : a ; b ; c ; d ; e"))


def test_q_wrap_and_errors():
    one = Abp(R, 1, [1, 1], [Edge(0, 0, 0, Var(0))])
    assert same(q_read(q_wrap(one)), P("poly mode=r vars=x : x"))
    with pytest.raises(ValueError):
        q_read(one)


# -- pass registry ------------------------------------------------------------------------


def test_parse_pass():
    assert parse_pass("widthreduce:p=2") == ("widthreduce", {"p": 2})
    assert parse_pass("brent") == ("brent", {})
    with pytest.raises(ValueError):
        parse_pass("nope")


def test_run_pass_reports():
    f = P(FIG_POLY)
    out, rep = run_pass("uni2w2", f)
    assert rep.ok and same(out, f)
    kv = rep.to_kv().splitlines()
    assert kv[0] == "pass=uni2w2" and kv[-1] == "ok=1"
    assert "bound.width.measured=2" in kv
    out, rep = run_pass("factor", f)
    assert rep.extra["roots"] == "1^2 2^1 3^1"
    assert "pass factor" in rep.to_text()


def test_run_pass_type_errors():
    with pytest.raises(ValueError):
        run_pass("widthreduce", P(FIG_POLY))
    with pytest.raises(ValueError):
        run_pass("biv2w2", left_comb(3))


def test_levels_needed():
    b = CircuitBuilder(R, 6)
    f = b.build_formula(b.sum([b.mul(b.var(i), b.var(i + 3)) for i in range(3)]))
    assert levels_needed(f) == 1
    assert levels_needed(left_comb(3, R)) == 1
