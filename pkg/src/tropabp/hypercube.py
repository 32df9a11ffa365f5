"""Hypercube sums: min over ∞-0 assignments of designated variables.

A :class:`HypercubeExpr` wraps an inner model whose variables ("slots") are
wired to free variables x_i, hypercube variables y_j, their complements ȳ_j,
or constants.  Its value at X is the min over Y ∈ {0, ∞}^q of the inner model.

Evaluation has two independent engines.  ``brute`` walks every assignment in
binary-counter order (bit 0 means y_j = 0).  ``factored`` splits the inner
model into ⊗-factors and runs a branch-and-bound search; the bound evaluates
each factor with the unassigned y_j and ȳ_j set to 0, a valid lower bound
because min and + are monotone.

This module also holds the explicit encodings: the permanent, Hamiltonian
cycles, and the parse-tree encoding of multiplicatively disjoint circuits
together with its width-2 and linear-form summands.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .models import (
    Abp,
    Circuit,
    CircuitBuilder,
    Const,
    Edge,
    Formula,
    Gate,
    Leaf,
    Lin,
    Model,
    Var,
    _postorder,
    abp_concat_all,
    abp_to_circuit,
    compact,
    expand,
    model_eval,
    nary_children,
    substitute,
)
from .poly import BudgetExceeded, TropPoly, check_point, poly_substitute, poly_sum
from .semiring import INF, Mode, TropValue, check_value, normalize

Slot = tuple  # ("x", i) | ("y", j) | ("ybar", j) | ("const", value)

BRUTE_BUDGET = 20


@dataclass(frozen=True, eq=False)
class VnfLayout:
    """Variable layout of a parse-tree encoding."""

    circuit: Circuit
    node_var: dict  # node id -> hypercube index of p_v
    edges: tuple  # (child, parent, slot) per child slot of every gate
    edge_var: dict  # edge -> hypercube index of a_e


@dataclass(frozen=True, eq=False)
class HypercubeExpr:
    inner: Model
    x_vars: int
    y_vars: int
    complemented: frozenset
    wiring: tuple
    layout: VnfLayout | None = None

    def __post_init__(self):
        object.__setattr__(self, "complemented", frozenset(self.complemented))
        object.__setattr__(self, "wiring", tuple(tuple(s) for s in self.wiring))
        if len(self.wiring) != self.inner.arity:
            raise ValueError(f"wiring has {len(self.wiring)} slots, inner model has {self.inner.arity}")
        for j in self.complemented:
            if not 0 <= j < self.y_vars:
                raise ValueError(f"complemented index {j} is not a hypercube variable")
        for k, (kind, arg) in enumerate(self.wiring):
            if kind == "x":
                if not 0 <= arg < self.x_vars:
                    raise ValueError(f"slot {k}: x index {arg} out of range")
            elif kind == "y":
                if not 0 <= arg < self.y_vars:
                    raise ValueError(f"slot {k}: y index {arg} out of range")
            elif kind == "ybar":
                if arg not in self.complemented:
                    raise ValueError(f"slot {k}: ȳ_{arg} used but {arg} is not complemented")
            elif kind == "const":
                check_value(normalize(arg), self.inner.mode)
            else:
                raise ValueError(f"slot {k}: unknown wiring kind {kind!r}")

    @property
    def mode(self) -> Mode:
        return self.inner.mode

    @property
    def r(self) -> int:
        return len(self.complemented)


class SlotSpace:
    """Allocates inner-model slots and hypercube variables for the encoders."""

    def __init__(self, x_vars: int):
        self.x_vars = x_vars
        self.wiring: list[Slot] = []
        self.index: dict[Slot, int] = {}
        self.y_vars = 0
        self.complemented: set[int] = set()

    def slot(self, s: Slot) -> int:
        got = self.index.get(s)
        if got is None:
            got = self.index[s] = len(self.wiring)
            self.wiring.append(s)
        return got

    def x(self, i: int) -> int:
        return self.slot(("x", i))

    def y(self, j: int) -> int:
        return self.slot(("y", j))

    def ybar(self, j: int) -> int:
        return self.slot(("ybar", j))

    def new_y(self, complemented: bool = True) -> int:
        j = self.y_vars
        self.y_vars += 1
        if complemented:
            self.complemented.add(j)
        return j

    def finish(self, inner: Model, layout: VnfLayout | None = None) -> HypercubeExpr:
        return HypercubeExpr(inner, self.x_vars, self.y_vars, frozenset(self.complemented), tuple(self.wiring), layout)


# -- evaluation ----------------------------------------------------------------


def _flip(v: TropValue) -> TropValue:
    return 0 if v is INF else INF


def _slot_values(e: HypercubeExpr, X: Sequence, Y: Sequence) -> list:
    """Inner point for an assignment; unassigned (None) entries read as 0."""
    out = []
    for kind, arg in e.wiring:
        if kind == "x":
            out.append(X[arg])
        elif kind == "y":
            v = Y[arg]
            out.append(0 if v is None else v)
        elif kind == "ybar":
            v = Y[arg]
            out.append(0 if v is None else _flip(v))
        else:
            out.append(normalize(arg))
    return out


def assignments(q: int):
    """All ∞-0 assignments of q variables in binary-counter order."""
    for m in range(1 << q):
        yield [INF if (m >> j) & 1 else 0 for j in range(q)]


def _check_x(e: HypercubeExpr, X: Sequence) -> tuple:
    return check_point(X, e.x_vars, e.mode)


def hypercube_eval(
    e: HypercubeExpr,
    X: Sequence,
    engine: str = "auto",
    budget: int = BRUTE_BUDGET,
    max_nodes: int | None = 10_000_000,
) -> TropValue:
    X = _check_x(e, X)
    if e.y_vars == 0:
        return model_eval(e.inner, _slot_values(e, X, []))
    if engine == "auto":
        engine = "brute" if e.y_vars <= 10 else "factored"
    if engine == "brute":
        if e.y_vars > budget:
            raise BudgetExceeded(f"{e.y_vars} hypercube variables exceed the brute-force budget {budget}")
        best: TropValue = INF
        for Y in assignments(e.y_vars):
            v = model_eval(e.inner, _slot_values(e, X, Y))
            if v is not INF and (best is INF or v < best):
                best = v
        return best
    if engine == "factored":
        return _branch_and_bound(e, X, max_nodes)
    raise ValueError(f"unknown engine {engine!r}")


def _inner_factors(m: Model) -> list[Model]:
    """Split the inner model into ⊗-factors over the same slot space."""
    if isinstance(m, Abp):
        last = len(m.layers) - 1
        cuts = sorted({0, last} | {k for k, n in enumerate(m.layers) if n == 1})
        by_layer = m.edges_by_layer()
        out = []
        for k0, k1 in zip(cuts, cuts[1:]):
            edges = [Edge(ed.layer - k0, ed.src, ed.dst, ed.label) for k in range(k0, k1) for ed in by_layer[k]]
            out.append(Abp(m.mode, m.arity, m.layers[k0 : k1 + 1], edges, m.kind))
        return out if last else [m]
    root = m.nodes[m.root]
    if not isinstance(root, Gate) or root.op != "plus":
        return [m]
    out = []
    for j in nary_children(m, m.root):
        b = CircuitBuilder(m.mode, m.arity)
        out.append(Circuit(m.mode, m.arity, b.nodes, b.import_node(m, j)))
    return out


def _model_slots(m: Model) -> set[int]:
    if isinstance(m, Abp):
        out = set()
        for ed in m.edges:
            if isinstance(ed.label, Var):
                out.add(ed.label.index)
            elif isinstance(ed.label, Lin):
                for exp in ed.label.poly.terms:
                    out.update(i for i, a in enumerate(exp) if a)
        return out
    return {m.nodes[i].label.index for i in m.reachable() if isinstance(m.nodes[i], Leaf) and isinstance(m.nodes[i].label, Var)}


def _fast_label(lab):
    if isinstance(lab, Var):
        i = lab.index
        return lambda pt: pt[i]
    if isinstance(lab, Const):
        c = lab.value
        return lambda pt: c
    terms = [(c, [(i, a) for i, a in enumerate(exp) if a]) for exp, c in lab.poly.terms.items()]

    def run_lin(pt):
        best = INF
        for c, mon in terms:
            v = c
            for i, a in mon:
                x = pt[i]
                if x is INF:
                    v = INF
                    break
                v = v + a * x
            if v is not INF and (best is INF or v < best):
                best = v
        return best

    return run_lin


def _fast_eval(m: Model):
    """Point evaluator without admissibility checks, for the search inner loop."""
    if isinstance(m, Abp):
        n0 = m.layers
        layers = []
        for es in m.edges_by_layer():
            layers.append([(ed.src, ed.dst, _fast_label(ed.label)) for ed in es])

        def run_abp(pt):
            cur = [INF] * n0[0]
            cur[0] = 0
            for k, es in enumerate(layers):
                nxt = [INF] * n0[k + 1]
                for src, dst, lab in es:
                    v = cur[src]
                    if v is INF:
                        continue
                    w = lab(pt)
                    if w is INF:
                        continue
                    t = v + w
                    if nxt[dst] is INF or t < nxt[dst]:
                        nxt[dst] = t
                cur = nxt
            return cur[0]

        return run_abp
    order = [(i, m.nodes[i]) for i in _postorder(m, m.root)]
    root = m.root

    def run_circuit(pt):
        vals = {}
        for i, nd in order:
            if isinstance(nd, Leaf):
                lab = nd.label
                vals[i] = pt[lab.index] if isinstance(lab, Var) else lab.value
            else:
                a, b = vals[nd.left], vals[nd.right]
                if nd.op == "min":
                    vals[i] = b if a is INF else (a if b is INF or a <= b else b)
                else:
                    vals[i] = INF if (a is INF or b is INF) else a + b
        return vals[root]

    return run_circuit


def _branch_and_bound(e: HypercubeExpr, X: tuple, max_nodes: int | None) -> TropValue:
    factors = []
    fslots: list[list[int]] = []
    fy: list[list[int]] = []
    for f in _inner_factors(e.inner):
        slots = sorted(_model_slots(f))
        local = [Const(0)] * f.arity
        for k, s_ in enumerate(slots):
            local[s_] = Var(k)
        factors.append(_fast_eval(substitute_model(f, local, len(slots))))
        fslots.append(slots)
        fy.append(sorted({e.wiring[s_][1] for s_ in slots if e.wiring[s_][0] in ("y", "ybar")}))
    order: list[int] = []
    seen: set[int] = set()
    for ys in fy:
        for j in ys:
            if j not in seen:
                seen.add(j)
                order.append(j)
    order += [j for j in range(e.y_vars) if j not in seen]
    touch: dict[int, list[int]] = {j: [] for j in range(e.y_vars)}
    for k, ys in enumerate(fy):
        for j in ys:
            touch[j].append(k)
    Y: list = [None] * e.y_vars
    caches: list[dict] = [dict() for _ in factors]
    wiring = e.wiring

    def slot_value(s_: int):
        kind, arg = wiring[s_]
        if kind == "x":
            return X[arg]
        if kind == "y":
            v = Y[arg]
            return 0 if v is None else v
        if kind == "ybar":
            v = Y[arg]
            return 0 if v is None else _flip(v)
        return normalize(arg)

    def fval(k: int) -> TropValue:
        key = tuple(Y[j] for j in fy[k])
        got = caches[k].get(key)
        if got is None:
            got = caches[k][key] = factors[k]([slot_value(s_) for s_ in fslots[k]])
        return got

    vals = [fval(k) for k in range(len(factors))]
    if any(v is INF for v in vals):
        return INF
    best: list = [INF]
    count = [0]

    def dfs(idx: int, total) -> None:
        if idx == len(order):
            if best[0] is INF or total < best[0]:
                best[0] = total
            return
        j = order[idx]
        for v in (0, INF):
            count[0] += 1
            if max_nodes is not None and count[0] > max_nodes:
                raise BudgetExceeded(f"branch and bound exceeded {max_nodes} nodes")
            Y[j] = v
            saved = [(k, vals[k]) for k in touch[j]]
            new_total = total
            dead = False
            for k, old in saved:
                nv = fval(k)
                vals[k] = nv
                if nv is INF:
                    dead = True
                else:
                    new_total = new_total - old + nv
            if not dead and (best[0] is INF or new_total < best[0]):
                dfs(idx + 1, new_total)
            for k, old in saved:
                vals[k] = old
        Y[j] = None

    dfs(0, sum(vals))
    return best[0]


# -- symbolic routes -----------------------------------------------------------


def substitute_model(m: Model, mapping: Sequence, arity: int) -> Model:
    """Replace each variable by ``mapping[i]`` (a Var of the new space or a Const)."""
    if isinstance(m, Abp):
        pmap = [("var", a.index) if isinstance(a, Var) else ("const", a.value) for a in mapping]
        edges = []
        for ed in m.edges:
            lab = ed.label
            if isinstance(lab, Var):
                lab = mapping[lab.index]
            elif isinstance(lab, Lin):
                lab = Lin(poly_substitute(lab.poly, pmap, arity))
            if isinstance(lab, Const) and lab.value is INF:
                continue
            edges.append(Edge(ed.layer, ed.src, ed.dst, lab))
        return Abp(m.mode, arity, m.layers, edges, m.kind)
    return substitute(m, mapping, arity)


def _assignment_map(e: HypercubeExpr, Y: Sequence) -> list:
    out = []
    for kind, arg in e.wiring:
        if kind == "x":
            out.append(Var(arg))
        elif kind == "y":
            out.append(Const(Y[arg]))
        elif kind == "ybar":
            out.append(Const(_flip(Y[arg])))
        else:
            out.append(Const(arg))
    return out


def hypercube_expand(e: HypercubeExpr, max_terms: int | None = 100_000, budget: int = BRUTE_BUDGET) -> TropPoly:
    """⊕ over all assignments of the expanded, substituted inner model."""
    if e.y_vars > budget:
        raise BudgetExceeded(f"{e.y_vars} hypercube variables exceed the expansion budget {budget}")
    parts = []
    for Y in assignments(e.y_vars):
        parts.append(expand(substitute_model(e.inner, _assignment_map(e, Y), e.x_vars), max_terms))
        if len(parts) >= 64:
            parts = [poly_sum(parts, e.mode, e.x_vars, max_terms)]
    return poly_sum(parts, e.mode, e.x_vars, max_terms)


def eliminate_complements(e: HypercubeExpr, budget: int = 16) -> Circuit:
    """Circuit over the x variables only: ⊕ over σ of the inner model under Φ_σ.

    Non-complemented y_j are set to 0 (the min of a monotone function over
    {0, ∞}); complemented pairs (y_i, ȳ_i) run over (0, ∞) and (∞, 0).
    """
    if isinstance(e.inner, Abp):
        raise ValueError("complement elimination takes a circuit or formula inner model")
    if e.r > budget:
        raise BudgetExceeded(f"{e.r} complemented variables exceed the elimination budget {budget}")
    comp = sorted(e.complemented)
    b = CircuitBuilder(e.mode, e.x_vars)
    branches = []
    for bits in itertools.product((0, INF), repeat=len(comp)):
        Y = [0] * e.y_vars
        for j, v in zip(comp, bits):
            Y[j] = v
        g = substitute(e.inner, _assignment_map(e, Y), e.x_vars)
        branches.append(b.import_node(g, g.root))
    return b.build(b.sum(branches, balanced=False))


# -- permanent and Hamiltonian cycle encodings ----------------------------------


def perm_encoding(n: int, mode: Mode = Mode.RPLUS) -> HypercubeExpr:
    """Permanent as a hypercube sum over binary row codes of a map [n] -> [n].

    x_{i,t} is free variable i·n + t.  Row i of Y holds t - 1 in binary (least
    significant bit first) with bit 0 read as y = 0; every y is complemented.
    The inner formula is the product of the row-distinctness factors and the
    selection factors, constants kept as written.
    """
    if n not in (2, 4, 8):
        raise ValueError("perm_encoding needs n in {2, 4, 8}")
    L = n.bit_length() - 1
    sp = SlotSpace(n * n)
    for i in range(n):
        for w in range(L):
            sp.new_y()

    def yv(i: int, w: int) -> int:
        return i * L + w

    # Allocate slots up front so the inner arity is known.
    for i in range(n * n):
        sp.x(i)
    for j in range(n * L):
        sp.y(j)
        sp.ybar(j)
    b = CircuitBuilder(mode, len(sp.wiring))
    factors = []
    for u in range(n):
        for v in range(u + 1, n):
            terms = []
            for w in range(L):
                a = b.mul(b.var(sp.ybar(yv(u, w))), b.var(sp.y(yv(v, w))))
                c = b.mul(b.var(sp.y(yv(u, w))), b.var(sp.ybar(yv(v, w))))
                terms.append(b.add(a, c))
            factors.append(b.sum(terms))
    for i in range(n):
        terms = []
        for t in range(n):
            bits = []
            for w in range(L):
                tw = INF if (t >> w) & 1 else 0
                bit = b.add(b.mul(b.const(tw), b.var(sp.y(yv(i, w)))), b.mul(b.const(_flip(tw)), b.var(sp.ybar(yv(i, w)))))
                bits.append(bit)
            terms.append(b.mul(b.var(sp.x(i * n + t)), b.prod(bits)))
        factors.append(b.sum(terms))
    return sp.finish(b.build_formula(b.prod(factors)))


def matrix_power_abp(n: int, k: int, u: int, v: int, var) -> tuple[list[int], list[Edge]]:
    """Layers and edges of the width-n ABP for entry (u, v) of Y^k (k >= 2).

    ``var(a, b)`` is the label of Y_ab.
    """
    layers = [1] + [n] * (k - 1) + [1]
    edges = []
    for w in range(n):
        edges.append(Edge(0, 0, w, var(u, w)))
    for layer in range(1, k - 1):
        for w in range(n):
            for w2 in range(n):
                edges.append(Edge(layer, w, w2, var(w, w2)))
    for w in range(n):
        edges.append(Edge(k - 1, w, 0, var(w, v)))
    return layers, edges


def hc_encoding(n: int, mode: Mode = Mode.RPLUS) -> HypercubeExpr:
    """Hamiltonian cycles as a hypercube sum over n x n ∞-0 matrices Y.

    Factors: every row of Y has a 0; no two 0s share a row or column, so Y is
    a permutation matrix; every (u, v) is hit by some power Y^k, k < n, so the
    permutation is one n-cycle; and the selection ⊕_t x_{i,t} ⊗ Y_{i,t}.
    """
    if n < 2:
        raise ValueError("hc_encoding needs n >= 2")
    sp = SlotSpace(n * n)
    for _ in range(n * n):
        sp.new_y()
    for i in range(n * n):
        sp.x(i)
    for j in range(n * n):
        sp.y(j)
        sp.ybar(j)
    b = CircuitBuilder(mode, len(sp.wiring))

    def Y(a: int, c: int) -> int:
        return b.var(sp.y(a * n + c))

    factors = []
    for i in range(n):
        factors.append(b.sum([Y(i, j) for j in range(n)]))
    cells = [(a, c) for a in range(n) for c in range(n)]
    for (a, c) in cells:
        for (a2, c2) in cells:
            if (a, c) != (a2, c2) and (a == a2 or c == c2):
                factors.append(b.add(b.var(sp.ybar(a * n + c)), b.var(sp.ybar(a2 * n + c2))))
    for u in range(n):
        for v in range(n):
            terms = [b.const(0 if u == v else INF), Y(u, v)]
            for k in range(2, n):
                layers, edges = matrix_power_abp(n, k, u, v, lambda a, c: Var(a * n + c))
                circ = abp_to_circuit(Abp(mode, n * n, layers, edges))
                slotmap = lambda lab: Var(sp.y(lab.index)) if isinstance(lab, Var) else lab
                terms.append(b.import_node(circ, circ.root, slotmap))
            factors.append(b.sum(terms))
    for i in range(n):
        factors.append(b.sum([b.mul(b.var(sp.x(i * n + t)), Y(i, t)) for t in range(n)]))
    inner = b.build(b.prod(factors))
    return sp.finish(inner)


# -- multiplicative disjointness ----------------------------------------------------


def _reach_sets(c: Circuit) -> dict[int, frozenset]:
    out: dict[int, frozenset] = {}
    for i in _postorder(c, c.root):
        nd = c.nodes[i]
        if isinstance(nd, Leaf):
            out[i] = frozenset((i,))
        else:
            out[i] = out[nd.left] | out[nd.right] | {i}
    return out


def is_multiplicatively_disjoint(c: Circuit) -> bool:
    reach = _reach_sets(c)
    for i in reach:
        nd = c.nodes[i]
        if isinstance(nd, Gate) and nd.op == "plus" and reach[nd.left] & reach[nd.right]:
            return False
    return True


def formal_degree(c: Circuit) -> dict[int, int]:
    """Leaves count 1, ⊕ takes the max, ⊗ the sum."""
    d: dict[int, int] = {}
    for i in _postorder(c, c.root):
        nd = c.nodes[i]
        if isinstance(nd, Leaf):
            d[i] = 1
        elif nd.op == "min":
            d[i] = max(d[nd.left], d[nd.right])
        else:
            d[i] = d[nd.left] + d[nd.right]
    return d


def make_multiplicatively_disjoint(c: Circuit, max_degree: int = 256) -> Circuit:
    """Clone gates by offset so ⊗ children never share a node.

    Copy (g, i) uses offsets in [i, i + deg(g)): an ⊗ gate reads (h, i) and
    (k, i + deg(h)), an ⊕ gate reads (h, i) and (k, i).  Offset ranges of the
    two ⊗ children are disjoint, hence so are their subcircuits.
    """
    if isinstance(c, Formula) or is_multiplicatively_disjoint(c):
        return c
    deg = formal_degree(c)
    if deg[c.root] > max_degree:
        raise BudgetExceeded(f"formal degree {deg[c.root]} exceeds the budget {max_degree}")
    b = CircuitBuilder(c.mode, c.arity)
    memo: dict[tuple[int, int], int] = {}

    def build(g: int, i: int) -> int:
        stack = [(g, i, False)]
        while stack:
            node, off, done = stack.pop()
            if (node, off) in memo:
                continue
            nd = c.nodes[node]
            if isinstance(nd, Leaf):
                memo[(node, off)] = b.leaf(nd.label)
                continue
            right_off = off + deg[nd.left] if nd.op == "plus" else off
            kids = [(nd.left, off), (nd.right, right_off)]
            if done:
                memo[(node, off)] = b.gate(nd.op, memo[kids[0]], memo[kids[1]])
                continue
            stack.append((node, off, True))
            for kid in kids:
                if kid not in memo:
                    stack.append((kid[0], kid[1], False))
        return memo[(g, i)]

    return b.build(build(c.root, 0))


# -- parse-tree encoding --------------------------------------------------------


def _vnf_layout(c: Circuit, sp: SlotSpace) -> VnfLayout:
    c = compact(c)
    node_var = {i: sp.new_y() for i in range(len(c.nodes))}
    edges = []
    for i, nd in enumerate(c.nodes):
        if isinstance(nd, Gate):
            edges.append((nd.left, i, 0))
            edges.append((nd.right, i, 1))
    edge_var = {ed: sp.new_y() for ed in edges}
    return VnfLayout(c, node_var, tuple(edges), edge_var)


def _vnf_factors(lay: VnfLayout) -> list[tuple]:
    """Factor records in emission order."""
    c = lay.circuit
    out: list[tuple] = [("B", ed) for ed in lay.edges]
    out.append(("root", c.root))
    parents: dict[int, list] = {}
    for ed in lay.edges:
        parents.setdefault(ed[0], []).append(ed)
    for i, nd in enumerate(c.nodes):
        if isinstance(nd, Gate):
            l = (nd.left, i, 0)
            r = (nd.right, i, 1)
            out.append(("C" if nd.op == "plus" else "D", i, l, r))
    for i in range(len(c.nodes)):
        if i != c.root:
            out.append(("E", i, tuple(parents.get(i, ()))))
    for i, nd in enumerate(c.nodes):
        if isinstance(nd, Leaf):
            out.append(("A", i, nd.label))
    return out


def _leaf_slot(sp: SlotSpace, lab):
    """Slot-space label for a circuit leaf label."""
    return Var(sp.x(lab.index)) if isinstance(lab, Var) else lab


def vnf_encoding(c: Circuit) -> HypercubeExpr:
    """Hypercube sum over parse trees of a multiplicatively disjoint circuit.

    p_v = 0 selects node v and a_e = 0 selects edge e (child, parent).  The
    summand is 0 plus the leaf labels exactly on parse trees and ∞ otherwise:
      B_e = ā_e ⊕ a_e ⊗ p_child ⊗ p_parent   (selected edges join selected nodes)
      p_root                                 (the root is selected)
      C_u = p̄_u ⊕ a_l ⊗ a_r                  (⊗ gates keep both children)
      D_u = p̄_u ⊕ a_l ⊗ ā_r ⊕ ā_l ⊗ a_r      (⊕ gates keep exactly one)
      E_u = p̄_u ⊕ ⊕_v a_(u,v)                (selected nodes have a selected parent)
      A_u = p̄_u ⊕ p_u ⊗ label(u)             (selected leaves pay their label)
    """
    if not is_multiplicatively_disjoint(c):
        raise ValueError("vnf_encoding needs a multiplicatively disjoint circuit")
    sp = SlotSpace(c.arity)
    lay = _vnf_layout(c, sp)
    for i in range(c.arity):
        sp.x(i)
    for j in range(sp.y_vars):
        sp.y(j)
        sp.ybar(j)
    b = CircuitBuilder(c.mode, len(sp.wiring))
    P = lambda v: b.var(sp.y(lay.node_var[v]))
    Pb = lambda v: b.var(sp.ybar(lay.node_var[v]))
    Aa = lambda ed: b.var(sp.y(lay.edge_var[ed]))
    Ab = lambda ed: b.var(sp.ybar(lay.edge_var[ed]))
    factors = []
    for rec in _vnf_factors(lay):
        kind = rec[0]
        if kind == "B":
            ch, par, _ = ed = rec[1]
            factors.append(b.add(Ab(ed), b.prod([Aa(ed), P(ch), P(par)])))
        elif kind == "root":
            factors.append(P(rec[1]))
        elif kind == "C":
            _, u, l, r = rec
            factors.append(b.add(Pb(u), b.mul(Aa(l), Aa(r))))
        elif kind == "D":
            _, u, l, r = rec
            factors.append(b.sum([Pb(u), b.mul(Aa(l), Ab(r)), b.mul(Ab(l), Aa(r))]))
        elif kind == "E":
            _, u, ups = rec
            factors.append(b.sum([Pb(u)] + [Aa(ed) for ed in ups]))
        else:
            _, u, lab = rec
            factors.append(b.add(Pb(u), b.mul(P(u), b.leaf(_leaf_slot(sp, lab)))))
    inner = b.build_formula(b.prod(factors))
    return sp.finish(inner, lay)


# -- width-2 gadgets ----------------------------------------------------------------


def _chain_pair(mode: Mode, arity: int, top: Sequence, bottom: Sequence) -> Abp:
    """Two disjoint source-sink paths of equal length; ``None`` marks a 0 edge."""
    L = len(top)
    zero = Const(0)
    layers = [1] + [2] * (L - 1) + [1]
    edges = []
    for k in range(L):
        for row, labels in ((0, top), (1, bottom)):
            src = 0 if k == 0 else row
            dst = 0 if k == L - 1 else row
            lab = labels[k] if labels[k] is not None else zero
            edges.append(Edge(k, src, dst, lab))
    return Abp(mode, arity, layers, edges)


def gadget_B(mode: Mode, arity: int, a: int, abar: int, pu: int, pv: int) -> Abp:
    """ā ⊕ a ⊗ p_u ⊗ p_v."""
    return _chain_pair(mode, arity, [Var(a), Var(pu), Var(pv)], [Var(abar), None, None])


def gadget_C(mode: Mode, arity: int, pbar: int, al: int, ar: int) -> Abp:
    """p̄ ⊕ a_l ⊗ a_r."""
    return _chain_pair(mode, arity, [Var(al), Var(ar), None], [Var(pbar), None, None])


def gadget_A(mode: Mode, arity: int, pbar: int, p: int, label) -> Abp:
    """p̄ ⊕ label ⊗ p."""
    return _chain_pair(mode, arity, [Var(pbar), None], [label, Var(p)])


def gadget_D(mode: Mode, arity: int, pbar: int, al: int, alb: int, ar: int, arb: int) -> Abp:
    """(p̄ ⊕ a_l ⊕ a_r) ⊗ (p̄ ⊕ ā_l ⊕ ā_r), equal to D on every ∞-0 assignment."""
    from .transforms.width2 import q_read, q_sum_atoms

    first = q_read(q_sum_atoms(mode, arity, [Var(pbar), Var(al), Var(ar)]))
    second = q_read(q_sum_atoms(mode, arity, [Var(pbar), Var(alb), Var(arb)]))
    return abp_concat_all([first, second])


def gadget_E(mode: Mode, arity: int, pbar: int, ups: Sequence[int]) -> Abp:
    """⊕_v (p̄ ⊕ a_(u,v)) in Q format, read at (0, 0)."""
    from .transforms.width2 import q_read, q_sum_atoms

    atoms = []
    for a in ups:
        atoms += [Var(pbar), Var(a)]
    if not atoms:
        atoms = [Var(pbar)]
    return q_read(q_sum_atoms(mode, arity, atoms))


def gadget_single(mode: Mode, arity: int, label) -> Abp:
    return Abp(mode, arity, [1, 1], [Edge(0, 0, 0, label)])


def _need_layout(e: HypercubeExpr) -> VnfLayout:
    if e.layout is None:
        raise ValueError("expected an expression produced by vnf_encoding")
    return e.layout


def width2_summand(e: HypercubeExpr) -> HypercubeExpr:
    """Same hypercube sum with the summand as one width-2 weakest ABP."""
    lay = _need_layout(e)
    idx = {s: k for k, s in enumerate(e.wiring)}
    mode, n = e.mode, len(e.wiring)
    y = lambda j: idx[("y", j)]
    yb = lambda j: idx[("ybar", j)]
    parts = []
    for rec in _vnf_factors(lay):
        kind = rec[0]
        if kind == "B":
            ch, par, _ = ed = rec[1]
            a = lay.edge_var[ed]
            parts.append(gadget_B(mode, n, y(a), yb(a), y(lay.node_var[ch]), y(lay.node_var[par])))
        elif kind == "root":
            parts.append(gadget_single(mode, n, Var(y(lay.node_var[rec[1]]))))
        elif kind == "C":
            _, u, l, r = rec
            parts.append(gadget_C(mode, n, yb(lay.node_var[u]), y(lay.edge_var[l]), y(lay.edge_var[r])))
        elif kind == "D":
            _, u, l, r = rec
            al, ar = lay.edge_var[l], lay.edge_var[r]
            parts.append(gadget_D(mode, n, yb(lay.node_var[u]), y(al), yb(al), y(ar), yb(ar)))
        elif kind == "E":
            _, u, ups = rec
            parts.append(gadget_E(mode, n, yb(lay.node_var[u]), [y(lay.edge_var[ed]) for ed in ups]))
        else:
            _, u, lab = rec
            label = Var(idx[("x", lab.index)]) if isinstance(lab, Var) else lab
            parts.append(gadget_A(mode, n, yb(lay.node_var[u]), y(lay.node_var[u]), label))
    inner = abp_concat_all(parts)
    return HypercubeExpr(inner, e.x_vars, e.y_vars, e.complemented, e.wiring, lay)


# -- linear-form summand over R⁺ ------------------------------------------------------


def linear_forms(mode: Mode, arity: int, atoms: Sequence) -> Lin:
    """⊕ of slot variables (ints) and constants as one linear-form label."""
    terms: dict = {}
    for a in atoms:
        if isinstance(a, Const):
            exp = (0,) * arity
            val = a.value
        else:
            idx = a.index if isinstance(a, Var) else a
            exp = tuple(1 if k == idx else 0 for k in range(arity))
            val = 0
        if val is INF:
            continue
        old = terms.get(exp)
        if old is None or val < old:
            terms[exp] = val
    return Lin(TropPoly(mode, arity, terms))


def linear_form_summand(e: HypercubeExpr) -> HypercubeExpr:
    """Hypercube sum whose summand is a product of linear forms (width-1 general ABP).

    Fresh complemented variables per factor turn each disjunction into a min
    over products of linear forms:
      B: (ā ⊕ λ̄)(p_u ⊕ λ)(p_v ⊕ λ)                 λ = 0 gives ā, λ = ∞ gives p_u p_v
      C: (p̄ ⊕ γ̄)(a_l ⊕ γ)(a_r ⊕ γ)
      D: (p̄ ⊕ ᾱ)(a_l ⊕ α ⊕ β)(ā_r ⊕ α ⊕ β)(ā_l ⊕ α ⊕ β̄)(a_r ⊕ α ⊕ β̄)
      E: p̄ ⊕ ⊕_v a_(u,v),   A: p̄ ⊕ label,   p_root
    """
    if e.mode is not Mode.RPLUS:
        raise ValueError("the linear-form summand is only valid over R⁺")
    lay = _need_layout(e)
    sp = SlotSpace(e.x_vars)
    sp.y_vars = e.y_vars
    sp.complemented = set(e.complemented)
    for s in e.wiring:
        sp.slot(s)
    fresh: list[tuple] = []
    recs = _vnf_factors(lay)
    for rec in recs:
        if rec[0] in ("B", "C"):
            j = sp.new_y()
            fresh.append((j,))
        elif rec[0] == "D":
            fresh.append((sp.new_y(), sp.new_y()))
        else:
            fresh.append(())
    for j in range(e.y_vars, sp.y_vars):
        sp.y(j)
        sp.ybar(j)
    n = len(sp.wiring)
    y = lambda j: sp.index[("y", j)]
    yb = lambda j: sp.index[("ybar", j)]
    forms: list[list] = []
    for rec, fr in zip(recs, fresh):
        kind = rec[0]
        if kind == "B":
            ch, par, _ = ed = rec[1]
            a, lam = lay.edge_var[ed], fr[0]
            forms += [[yb(a), yb(lam)], [y(lay.node_var[ch]), y(lam)], [y(lay.node_var[par]), y(lam)]]
        elif kind == "root":
            forms.append([y(lay.node_var[rec[1]])])
        elif kind == "C":
            _, u, l, r = rec
            g = fr[0]
            forms += [[yb(lay.node_var[u]), yb(g)], [y(lay.edge_var[l]), y(g)], [y(lay.edge_var[r]), y(g)]]
        elif kind == "D":
            _, u, l, r = rec
            al, ar = lay.edge_var[l], lay.edge_var[r]
            al_, be = fr
            forms += [
                [yb(lay.node_var[u]), yb(al_)],
                [y(al), y(al_), y(be)],
                [yb(ar), y(al_), y(be)],
                [yb(al), y(al_), yb(be)],
                [y(ar), y(al_), yb(be)],
            ]
        elif kind == "E":
            _, u, ups = rec
            forms.append([yb(lay.node_var[u])] + [y(lay.edge_var[ed]) for ed in ups])
        else:
            _, u, lab = rec
            label = Var(sp.index[("x", lab.index)]) if isinstance(lab, Var) else lab
            forms.append([yb(lay.node_var[u]), label])
    edges = [Edge(k, 0, 0, linear_forms(e.mode, n, atoms)) for k, atoms in enumerate(forms)]
    inner = Abp(e.mode, n, [1] * (len(forms) + 1), edges, "general")
    return sp.finish(inner, lay)


__all__ = [
    "HypercubeExpr",
    "VnfLayout",
    "SlotSpace",
    "assignments",
    "hypercube_eval",
    "hypercube_expand",
    "substitute_model",
    "eliminate_complements",
    "perm_encoding",
    "hc_encoding",
    "matrix_power_abp",
    "is_multiplicatively_disjoint",
    "formal_degree",
    "make_multiplicatively_disjoint",
    "vnf_encoding",
    "width2_summand",
    "linear_form_summand",
    "gadget_A",
    "gadget_B",
    "gadget_C",
    "gadget_D",
    "gadget_E",
    "linear_forms",
]
