"""Exhaustive truth-table checks for the width-2 gadgets and linear-form factors."""

import itertools

from tropabp.hypercube import (
    HypercubeExpr,
    gadget_A,
    gadget_B,
    gadget_C,
    gadget_D,
    gadget_E,
    hypercube_eval,
    linear_forms,
)
from tropabp.models import Abp, Const, Edge, Var, model_eval
from tropabp.semiring import INF, Mode, trop_prod, trop_sum

BITS = (0, INF)
LABELS = (0, 1, 5, INF)


def flip(v):
    return 0 if v is INF else INF


def _width2_cases(mode):
    """(name, abp, slot values, expected) for every ∞-0 assignment."""
    for a, pu, pv in itertools.product(BITS, repeat=3):
        g = gadget_B(mode, 4, 0, 1, 2, 3)
        yield "B", g, [a, flip(a), pu, pv], trop_sum([flip(a), trop_prod([a, pu, pv])])
    for p, al, ar in itertools.product(BITS, repeat=3):
        g = gadget_C(mode, 3, 0, 1, 2)
        yield "C", g, [flip(p), al, ar], trop_sum([flip(p), trop_prod([al, ar])])
    for p, al, ar in itertools.product(BITS, repeat=3):
        g = gadget_D(mode, 5, 0, 1, 2, 3, 4)
        want = trop_sum([flip(p), trop_prod([al, flip(ar)]), trop_prod([flip(al), ar])])
        yield "D", g, [flip(p), al, flip(al), ar, flip(ar)], want
    for k in range(4):
        for bits in itertools.product(BITS, repeat=k + 1):
            p, ups = bits[0], list(bits[1:])
            g = gadget_E(mode, k + 1, 0, list(range(1, k + 1)))
            yield f"E{k}", g, [flip(p)] + ups, trop_sum([flip(p)] + ups)
    labels = LABELS + ((-3,) if mode is Mode.R else ())
    for p, lab in itertools.product(BITS, labels):
        g = gadget_A(mode, 3, 0, 1, Var(2))
        yield "A", g, [flip(p), p, lab], trop_sum([flip(p), trop_prod([p, lab])])
        g = gadget_A(mode, 2, 0, 1, Const(lab))
        yield "A-const", g, [flip(p), p], trop_sum([flip(p), trop_prod([p, lab])])


def width2_gadget_failures(mode):
    bad = []
    n = 0
    for name, g, pt, want in _width2_cases(mode):
        n += 1
        if g.width > 2 or g.kind != "weakest":
            bad.append((name, "shape", g.layers))
        got = model_eval(g, pt)
        if got != want:
            bad.append((name, pt, got, want))
    return n, bad


def _product_expr(mode, n_x, fresh, factors):
    """Hypercube sum over ``fresh`` complemented variables of a product of linear forms.

    Slots 0..n_x-1 are the x inputs, then y_j / ȳ_j pairs for the fresh variables.
    """
    arity = n_x + 2 * fresh
    wiring = [("x", i) for i in range(n_x)]
    for j in range(fresh):
        wiring += [("y", j), ("ybar", j)]
    edges = [Edge(k, 0, 0, linear_forms(mode, arity, atoms)) for k, atoms in enumerate(factors)]
    inner = Abp(mode, arity, [1] * (len(factors) + 1), edges, "general")
    return HypercubeExpr(inner, n_x, fresh, frozenset(range(fresh)), tuple(wiring))


def linear_form_failures():
    """B, C, D and A factors as hypercube sums of linear-form products over R⁺."""
    mode = Mode.RPLUS
    bad = []
    n = 0
    # B over x = (a, ā, p_u, p_v), fresh λ at slots 4, 5.
    e = _product_expr(mode, 4, 1, [[1, 5], [2, 4], [3, 4]])
    for a, pu, pv in itertools.product(BITS, repeat=3):
        n += 1
        X = (a, flip(a), pu, pv)
        want = trop_sum([flip(a), trop_prod([a, pu, pv])])
        if hypercube_eval(e, X, "brute") != want:
            bad.append(("B", X))
    # C over x = (p̄, a_l, a_r), fresh γ at slots 3, 4.
    e = _product_expr(mode, 3, 1, [[0, 4], [1, 3], [2, 3]])
    for p, al, ar in itertools.product(BITS, repeat=3):
        n += 1
        X = (flip(p), al, ar)
        if hypercube_eval(e, X, "brute") != trop_sum([flip(p), trop_prod([al, ar])]):
            bad.append(("C", X))
    # D over x = (p̄, a_l, ā_l, a_r, ā_r), fresh α at 5, 6 and β at 7, 8.
    e = _product_expr(mode, 5, 2, [[0, 6], [1, 5, 7], [4, 5, 7], [2, 5, 8], [3, 5, 8]])
    for p, al, ar in itertools.product(BITS, repeat=3):
        n += 1
        X = (flip(p), al, flip(al), ar, flip(ar))
        want = trop_sum([flip(p), trop_prod([al, flip(ar)]), trop_prod([flip(al), ar])])
        if hypercube_eval(e, X, "brute") != want:
            bad.append(("D", X))
    # The four (α, β) branches of D individually.
    for p, al, ar in itertools.product(BITS, repeat=3):
        X = (flip(p), al, flip(al), ar, flip(ar))
        branch = {
            (0, 0): flip(p),
            (0, INF): flip(p),
            (INF, 0): trop_prod([flip(al), ar]),
            (INF, INF): trop_prod([al, flip(ar)]),
        }
        for (alpha, beta), want in branch.items():
            n += 1
            pt = list(X) + [alpha, flip(alpha), beta, flip(beta)]
            if model_eval(e.inner, pt) != want:
                bad.append(("D-branch", X, alpha, beta))
    # A over x = (p̄, p, label): p̄ ⊕ label equals p̄ ⊕ p ⊗ label.
    e = _product_expr(mode, 3, 0, [[0, 2]])
    for p, lab in itertools.product(BITS, LABELS):
        n += 1
        X = (flip(p), p, lab)
        if hypercube_eval(e, X) != trop_sum([flip(p), trop_prod([p, lab])]):
            bad.append(("A", X))
    return n, bad
