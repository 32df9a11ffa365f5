"""Seeded random generators for test corpora."""

from __future__ import annotations

import random
from typing import Sequence

from .models import Abp, Circuit, CircuitBuilder, Const, Edge, Formula, Var
from .poly import TropPoly
from .semiring import INF, Mode


def _atom(rng: random.Random, mode: Mode, arity: int, p_const: float, cmax: int):
    if arity == 0 or rng.random() < p_const:
        lo = 0 if mode is Mode.RPLUS else -cmax
        return Const(rng.randint(lo, cmax))
    return Var(rng.randrange(arity))


def random_formula(
    rng: random.Random,
    mode: Mode,
    arity: int,
    size: int,
    p_const: float = 0.2,
    cmax: int = 5,
    p_plus: float = 0.5,
) -> Formula:
    """Random binary formula with about ``size`` nodes (odd sizes are exact)."""
    leaves = max(1, (size + 1) // 2)
    b = CircuitBuilder(mode, arity)
    pool = [b.leaf(_atom(rng, mode, arity, p_const, cmax)) for _ in range(leaves)]
    while len(pool) > 1:
        i = rng.randrange(len(pool))
        left = pool.pop(i)
        j = rng.randrange(len(pool))
        right = pool.pop(j)
        op = "plus" if rng.random() < p_plus else "min"
        pool.append(b.gate(op, left, right))
    return b.build_formula(pool[0])


def random_deep_formula(rng: random.Random, mode: Mode, arity: int, size: int, **kw) -> Formula:
    """Caterpillar-shaped formula: each gate has a small side operand."""
    p_const = kw.get("p_const", 0.2)
    cmax = kw.get("cmax", 5)
    b = CircuitBuilder(mode, arity)
    acc = b.leaf(_atom(rng, mode, arity, p_const, cmax))
    count = 1
    while count + 2 <= size:
        if count + 4 <= size and rng.random() < 0.25:
            l = b.leaf(_atom(rng, mode, arity, p_const, cmax))
            r = b.leaf(_atom(rng, mode, arity, p_const, cmax))
            side = b.gate(rng.choice(("min", "plus")), l, r)
            count += 2
        else:
            side = b.leaf(_atom(rng, mode, arity, p_const, cmax))
        op = rng.choice(("min", "plus"))
        acc = b.gate(op, acc, side) if rng.random() < 0.5 else b.gate(op, side, acc)
        count += 2
    return b.build_formula(acc)


def random_alternating_formula(
    rng: random.Random,
    mode: Mode,
    arity: int,
    p: int,
    max_size: int = 300,
    max_fanin: Sequence[int] | None = None,
    p_const: float = 0.15,
    cmax: int = 5,
) -> Formula:
    """Random ⊕⊗ alternating formula of depth 2p, binary size ≤ max_size."""
    if max_fanin is None:
        max_fanin = [3] * (2 * p)
    while True:
        b = CircuitBuilder(mode, arity)
        count = [0]

        def gen(level: int) -> int:
            if level == 0:
                count[0] += 1
                return b.leaf(_atom(rng, mode, arity, p_const, cmax))
            k = rng.randint(1, max_fanin[level - 1])
            op = "plus" if level % 2 == 1 else "min"
            kids = [gen(level - 1) for _ in range(k)]
            if k == 1:
                count[0] += 2
                return b.gate(op, kids[0], b.const(0 if op == "plus" else INF))
            count[0] += k - 1
            return b.fold(op, kids, balanced=rng.random() < 0.5)

        root = gen(2 * p)
        f = b.build_formula(root)
        if len(f.nodes) <= max_size:
            from .transforms.alternating import normalize_alternating

            g = normalize_alternating(f, p)
            if len(g.nodes) <= max_size:
                return g


def random_circuit(
    rng: random.Random,
    mode: Mode,
    arity: int,
    size: int,
    p_const: float = 0.2,
    cmax: int = 5,
    p_plus: float = 0.5,
) -> Circuit:
    """Random DAG circuit with exactly ``size`` nodes that may share subcircuits."""
    b = CircuitBuilder(mode, arity)
    n_leaves = max(1, size // 3)
    for _ in range(n_leaves):
        b.leaf(_atom(rng, mode, arity, p_const, cmax))
    while len(b.nodes) < size:
        k = len(b.nodes)
        l = rng.randrange(k)
        r = rng.randrange(k)
        if rng.random() < 0.6:
            l = rng.randrange(max(0, k - 3), k)
        op = "plus" if rng.random() < p_plus else "min"
        b.gate(op, l, r)
    return b.build(len(b.nodes) - 1)


def random_abp(
    rng: random.Random,
    mode: Mode,
    arity: int,
    n_layers: int,
    max_width: int,
    density: float = 0.6,
    p_const: float = 0.3,
    cmax: int = 5,
    labels: Sequence | None = None,
) -> Abp:
    """Random weakest ABP with single-vertex source and sink layers."""
    if n_layers < 2:
        return Abp(mode, arity, [1], [])
    sizes = [1] + [rng.randint(1, max_width) for _ in range(n_layers - 2)] + [1]
    edges = []
    for k in range(n_layers - 1):
        for i in range(sizes[k]):
            for j in range(sizes[k + 1]):
                if rng.random() < density:
                    lab = rng.choice(labels) if labels else _atom(rng, mode, arity, p_const, cmax)
                    edges.append(Edge(k, i, j, lab))
    return Abp(mode, arity, sizes, edges)


def random_poly(
    rng: random.Random, mode: Mode, arity: int, degree: int, n_terms: int, cmin: int = -5, cmax: int = 5
) -> TropPoly:
    lo = max(cmin, 0) if mode is Mode.RPLUS else cmin
    terms = {}
    for _ in range(n_terms):
        exp = [0] * arity
        d = rng.randint(0, degree)
        for _ in range(d):
            exp[rng.randrange(arity)] += 1
        terms[tuple(exp)] = rng.randint(lo, cmax)
    return TropPoly(mode, arity, terms)


def random_point(rng: random.Random, mode: Mode, arity: int, lo: int = -10, hi: int = 10, p_inf: float = 0.0):
    lo = max(lo, 0) if mode is Mode.RPLUS else lo
    out = []
    for _ in range(arity):
        if p_inf and rng.random() < p_inf:
            out.append(INF)
        else:
            out.append(rng.randint(lo, hi))
    return out


def random_md_circuit(
    rng: random.Random,
    mode: Mode,
    arity: int,
    size: int,
    p_const: float = 0.2,
    cmax: int = 5,
    p_plus: float = 0.5,
) -> Circuit:
    """Random multiplicatively disjoint DAG circuit with at most ``size`` nodes.

    ⊕ gates may reuse any earlier nodes; ⊗ gates only combine nodes whose
    subcircuits are vertex disjoint.
    """
    b = CircuitBuilder(mode, arity)
    reach: list[frozenset] = []
    n_leaves = max(1, (size + 1) // 3)
    for _ in range(n_leaves):
        b.leaf(_atom(rng, mode, arity, p_const, cmax))
        reach.append(frozenset((len(reach),)))
    while len(b.nodes) < size:
        k = len(b.nodes)
        op = "plus" if rng.random() < p_plus else "min"
        for _ in range(20):
            l = rng.randrange(max(0, k - 3), k) if rng.random() < 0.6 else rng.randrange(k)
            r = rng.randrange(k)
            if l == r and op == "plus":
                continue
            if op == "plus" and reach[l] & reach[r]:
                continue
            break
        else:
            op = "min"
        b.gate(op, l, r)
        reach.append(reach[l] | reach[r] | {k})
    return b.build(len(b.nodes) - 1)


def random_hypercube_expr(
    rng: random.Random,
    mode: Mode,
    x_vars: int,
    y_vars: int,
    r: int,
    size: int,
    p_const: float = 0.1,
):
    """Random formula summand over x, y and the complements of the first r y's."""
    from .hypercube import HypercubeExpr

    wiring = [("x", i) for i in range(x_vars)] + [("y", j) for j in range(y_vars)]
    wiring += [("ybar", j) for j in range(r)]
    f = random_formula(rng, mode, len(wiring), size, p_const=p_const)
    return HypercubeExpr(f, x_vars, y_vars, frozenset(range(r)), wiring)
