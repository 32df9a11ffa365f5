"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import math
import random
import time

import pytest

from gadget_checks import linear_form_failures, width2_gadget_failures
from tropabp import corpus
from tropabp.families import cyclic_permutations, hc_poly, inner_product_poly, perm_poly
from tropabp.hypercube import (
    eliminate_complements,
    hc_encoding,
    hypercube_eval,
    hypercube_expand,
    is_multiplicatively_disjoint,
    linear_form_summand,
    perm_encoding,
    vnf_encoding,
    width2_summand,
)
from tropabp.models import depth, expand, model_eval, size, stats
from tropabp.poly import TropPoly, canonicalize, func_equal, parse_poly, poly_eval
from tropabp.semiring import Mode
from tropabp.transforms import (
    abp_width_reduce,
    alt_formula_to_abp,
    bivariate_to_width2,
    brent_depth_reduce,
    factor_product,
    normalize_alternating,
    univariate_factor,
)
from tropabp.transforms.brent import depth_bound
from tropabp.verify import width2_survey

R, RP = Mode.R, Mode.RPLUS


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def test_c01_alternating_to_abp(report):
    t0 = time.perf_counter()
    bad, worst = [], 0.0
    for p in (1, 2, 3):
        rng = random.Random(100 + p)
        for k in range(100):
            mode = R if k % 2 else RP
            f = corpus.random_alternating_formula(rng, mode, 4, p, 300)
            a = alt_formula_to_abp(normalize_alternating(f, p))
            s = len(f.nodes)
            ratio = stats(a)["size"] / (p * s)
            worst = max(worst, ratio)
            if s > 300 or a.width != 2 * p + 1 or ratio > 10 or not func_equal(expand(a), expand(f)):
                bad.append((p, k))
    dt = time.perf_counter() - t0
    report(1, not bad and dt <= 60, f"300 formulas, failures={len(bad)}, max size/(p*s)={worst:.3f} (<=10), {dt:.1f}s (<=60s)")


def test_c02_bivariate_width2(report):
    t0 = time.perf_counter()
    rng = random.Random(2)
    bad, worst = [], 0.0
    for k in range(100):
        d = rng.randint(0, 30)
        terms = {}
        for _ in range(rng.randint(1, 15)):
            i = rng.randint(0, d)
            terms[(i, rng.randint(0, d - i))] = 0
        f = TropPoly(RP, 2, terms)
        a = bivariate_to_width2(f)
        bound = 8 * (f.degree() + 1)
        worst = max(worst, stats(a)["size"] / bound)
        if a.width != 2 or stats(a)["size"] > bound or not func_equal(expand(a), f):
            bad.append(k)
    dt = time.perf_counter() - t0
    report(2, not bad and dt <= 30, f"100 polys, failures={len(bad)}, max size/(8(deg+1))={worst:.3f}, {dt:.1f}s (<=30s)")


def test_c03_depth_reduction(report):
    t0 = time.perf_counter()
    rng = random.Random(3)
    bad, worst_d, worst_s = [], 0.0, 0.0
    for k in range(100):
        n = rng.randint(100, 500)
        gen = corpus.random_deep_formula if k % 2 else corpus.random_formula
        f = gen(rng, RP, 4, n)
        s = len(f.nodes)
        g = brent_depth_reduce(f)
        memo = {}
        worst_d = max(worst_d, depth(g) / math.log2(s))
        worst_s = max(worst_s, math.log(len(g.nodes)) / math.log(s))
        if s > 500 or depth(g) > depth_bound(s) or len(g.nodes) > s**3 or not func_equal(expand(g, memo=memo), expand(f, memo=memo)):
            bad.append(k)
    dt = time.perf_counter() - t0
    report(
        3,
        not bad and dt <= 120,
        f"100 formulas, failures={len(bad)}, max depth/log2(s)={worst_d:.2f}, max log(size)/log(s)={worst_s:.2f}, {dt:.1f}s (<=120s)",
    )


def test_c04_factoring(report):
    f = parse_poly("poly mode=r vars=x : x^4 ; 2*x^2 ; 4*x ; 7")[0]
    fac = univariate_factor(f)
    ok = set(fac.roots) == {(1, 2), (2, 1), (3, 1)} and func_equal(factor_product(fac), f)
    report(4, ok, f"roots={fac.roots}")


def test_c05_complement_elimination(report):
    t0 = time.perf_counter()
    rng = random.Random(5)
    bad = []
    for k in range(50):
        mode = R if k % 2 else RP
        r = k % 4
        e = corpus.random_hypercube_expr(rng, mode, 3, rng.randint(max(r, 1), 8), r, rng.randint(5, 30))
        c = eliminate_complements(e)
        if size(c) > 2**e.r * (size(e.inner) + 4) or not func_equal(expand(c), hypercube_expand(e)):
            bad.append(k)
    dt = time.perf_counter() - t0
    report(5, not bad and dt <= 30, f"50 expressions, failures={len(bad)}, {dt:.1f}s (<=30s)")


def test_c06_permanent(report):
    t0 = time.perf_counter()
    sym = func_equal(hypercube_expand(perm_encoding(2)), perm_poly(2))
    e = perm_encoding(4)
    rng = random.Random(6)
    bad = 0
    for _ in range(50):
        X = [rng.randint(0, 20) for _ in range(16)]
        want = min(sum(X[4 * i + s[i]] for i in range(4)) for s in itertools.permutations(range(4)))
        bad += hypercube_eval(e, X) != want
    dt = time.perf_counter() - t0
    report(6, sym and not bad and dt <= 60, f"n=2 symbolic={sym}, n=4 mismatches={bad}/50, {dt:.1f}s (<=60s)")


def test_c07_hamiltonian_cycles(report):
    t0 = time.perf_counter()
    sym = func_equal(hypercube_expand(hc_encoding(3)), hc_poly(3))
    e = hc_encoding(4)
    rng = random.Random(7)
    bad = 0
    for _ in range(50):
        X = [rng.randint(0, 20) for _ in range(16)]
        want = min(sum(X[4 * i + s[i]] for i in range(4)) for s in cyclic_permutations(4))
        bad += hypercube_eval(e, X) != want
    dt = time.perf_counter() - t0
    report(7, sym and not bad, f"n=3 symbolic={sym}, n=4 mismatches={bad}/50, {dt:.1f}s")


def test_c08_parse_tree_pipeline(report):
    t0 = time.perf_counter()
    rng = random.Random(8)
    bad = []
    for k in range(25):
        c = corpus.random_md_circuit(rng, RP, 3, rng.randint(3, 12))
        assert is_multiplicatively_disjoint(c) and len(c.nodes) <= 12
        e = vnf_encoding(c)
        w = width2_summand(e)
        lf = linear_form_summand(e)
        for _ in range(50):
            X = corpus.random_point(rng, RP, 3, 0, 20)
            want = model_eval(c, X)
            got = (hypercube_eval(e, X), hypercube_eval(w, X), hypercube_eval(lf, X))
            if got != (want, want, want):
                bad.append((k, X, got, want))
    n_r, bad_r = width2_gadget_failures(R)
    n_p, bad_p = width2_gadget_failures(RP)
    n_l, bad_l = linear_form_failures()
    dt = time.perf_counter() - t0
    ok = not bad and not bad_r and not bad_p and not bad_l
    report(
        8,
        ok,
        f"25 circuits x 50 points x 3 summands, mismatches={len(bad)}; gadget cases={n_r + n_p} failures={len(bad_r) + len(bad_p)}; "
        f"linear-form cases={n_l} failures={len(bad_l)}, {dt:.1f}s",
    )


def test_c09_width_reduction(report):
    t0 = time.perf_counter()
    rng = random.Random(9)
    bad = []
    for k in range(20):
        p = 1 + k % 2
        while True:
            a = corpus.random_abp(rng, R if k % 3 else RP, 3, rng.randint(4, 5), 4, density=0.85)
            if a.width >= 3 and expand(a).terms:
                break
        out = abp_width_reduce(a, p)
        if out.width != 2 * p + 1 or not func_equal(expand(out), expand(a)):
            bad.append(k)
    dt = time.perf_counter() - t0
    report(9, not bad and dt <= 60, f"20 ABPs (3-4 edge layers, width 3-4), failures={len(bad)}, {dt:.1f}s (<=60s)")


def test_c10_width2_survey(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    for mode in (R, RP):
        main = width2_survey(inner_product_poly(3, mode), max_layers=6, samples=100_000, seed=0)
        ctl = width2_survey(inner_product_poly(2, mode), max_layers=6, samples=100_000, seed=0)
        ok = ok and main.match_count == 0 and ctl.match_count >= 1 and main.samples == ctl.samples == 100_000
        lines.append(f"{mode}: 3-term matches={main.match_count} controls={ctl.match_count}")
    dt = time.perf_counter() - t0
    report(10, ok and dt <= 120, "; ".join(lines) + f", {dt:.1f}s (<=120s)")


def test_c11_canonicalization_soundness(report):
    t0 = time.perf_counter()
    bad = 0
    for mode in (R, RP):
        rng = random.Random(11 if mode is R else 12)
        for _ in range(1000):
            arity = rng.randint(1, 3)
            f = corpus.random_poly(rng, mode, arity, rng.randint(0, 6), rng.randint(1, 12))
            g = canonicalize(f)
            for _ in range(100):
                pt = corpus.random_point(rng, mode, arity, -20, 20, p_inf=0.05)
                bad += poly_eval(f, pt) != poly_eval(g, pt)
    dt = time.perf_counter() - t0
    report(11, bad == 0, f"2 x 1000 polynomials x 100 points, mismatches={bad}, {dt:.1f}s")
