"""Circuits, formulas and layered ABPs over the tropical semirings.

Circuits store binary gates in topological order (children before parents).
A :class:`Formula` is a circuit whose nodes have fan-out at most one, plus an
optional per-level fan-in profile for alternating formulas.

An :class:`Abp` is a layered DAG.  ``layers[k]`` is the number of vertices in
vertex layer ``k`` and an edge at ``layer=k`` goes from layer ``k`` to layer
``k+1``.  The source is vertex 0 of the first layer, the sink vertex 0 of the
last layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .poly import BudgetExceeded, TropPoly, check_point, poly_eval, poly_mul, poly_sum
from .semiring import INF, Mode, TropValue, check_value, format_value, normalize


# -- labels -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self) -> str:
        return f"var:{self.index}"


@dataclass(frozen=True)
class Const:
    value: TropValue

    def __post_init__(self):
        object.__setattr__(self, "value", normalize(self.value))

    def __str__(self) -> str:
        return f"const:{format_value(self.value)}"


@dataclass(frozen=True)
class Lin:
    """Degree-at-most-one polynomial label of a general ABP."""

    poly: TropPoly

    def __post_init__(self):
        if self.poly.degree() > 1:
            raise ValueError("linear-form label must have degree at most 1")


Label = Union[Var, Const, Lin]
Atom = Union[Var, Const]


def label_eval(label: Label, point: Sequence[TropValue]) -> TropValue:
    if isinstance(label, Var):
        return point[label.index]
    if isinstance(label, Const):
        return label.value
    return poly_eval(label.poly, point)


def label_poly(label: Label, mode: Mode, arity: int) -> TropPoly:
    if isinstance(label, Var):
        return TropPoly.variable(mode, arity, label.index)
    if isinstance(label, Const):
        if label.value is INF:
            return TropPoly.empty(mode, arity)
        return TropPoly.constant(mode, arity, label.value)
    return label.poly


# -- circuits and formulas ----------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    label: Atom


@dataclass(frozen=True)
class Gate:
    op: str  # "min" (⊕) or "plus" (⊗)
    left: int
    right: int


Node = Union[Leaf, Gate]
OPS = ("min", "plus")


class Circuit:
    """Binary min/plus circuit; nodes are listed children-first."""

    kind = "circuit"

    def __init__(self, mode: Mode, arity: int, nodes: Sequence[Node], root: int):
        self.mode = mode
        self.arity = arity
        self.nodes = tuple(nodes)
        self.root = root
        if not 0 <= root < len(self.nodes):
            raise ValueError(f"root {root} out of range")
        for i, nd in enumerate(self.nodes):
            if isinstance(nd, Gate):
                if nd.op not in OPS:
                    raise ValueError(f"node {i}: unknown op {nd.op!r}")
                if not (0 <= nd.left < i and 0 <= nd.right < i):
                    raise ValueError(f"node {i}: children must precede their gate")
            elif isinstance(nd, Leaf):
                lab = nd.label
                if isinstance(lab, Var):
                    if not 0 <= lab.index < arity:
                        raise ValueError(f"node {i}: variable {lab.index} out of range")
                elif isinstance(lab, Const):
                    check_value(lab.value, mode)
                else:
                    raise ValueError(f"node {i}: leaf label must be a variable or constant")
            else:
                raise ValueError(f"node {i}: not a node")

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.mode is other.mode
            and self.arity == other.arity
            and self.nodes == other.nodes
            and self.root == other.root
            and getattr(self, "level_profile", None) == getattr(other, "level_profile", None)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.mode, self.arity, self.nodes, self.root))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(mode={self.mode}, arity={self.arity}, size={len(self.nodes)})"

    def reachable(self) -> list[int]:
        seen = [False] * len(self.nodes)
        stack = [self.root]
        seen[self.root] = True
        while stack:
            nd = self.nodes[stack.pop()]
            if isinstance(nd, Gate):
                for c in (nd.left, nd.right):
                    if not seen[c]:
                        seen[c] = True
                        stack.append(c)
        return [i for i, s in enumerate(seen) if s]

    def children(self, i: int) -> tuple[int, ...]:
        nd = self.nodes[i]
        return (nd.left, nd.right) if isinstance(nd, Gate) else ()

    def fanout(self) -> list[int]:
        out = [0] * len(self.nodes)
        for i in self.reachable():
            for c in self.children(i):
                out[c] += 1
        return out


class Formula(Circuit):
    """Tree-shaped circuit, optionally carrying an alternating level profile."""

    kind = "formula"

    def __init__(self, mode, arity, nodes, root, level_profile: Sequence[int] | None = None):
        super().__init__(mode, arity, nodes, root)
        self.level_profile = tuple(level_profile) if level_profile is not None else None


class CircuitBuilder:
    """Incremental construction of a circuit; optional hash-consing for DAGs."""

    def __init__(self, mode: Mode, arity: int, share: bool = False):
        self.mode = mode
        self.arity = arity
        self.nodes: list[Node] = []
        self._share = share
        self._memo: dict[Node, int] = {}

    def _add(self, nd: Node) -> int:
        if self._share:
            got = self._memo.get(nd)
            if got is not None:
                return got
        self.nodes.append(nd)
        idx = len(self.nodes) - 1
        if self._share:
            self._memo[nd] = idx
        return idx

    def leaf(self, label: Atom) -> int:
        return self._add(Leaf(label))

    def var(self, i: int) -> int:
        return self._add(Leaf(Var(i)))

    def const(self, c: TropValue) -> int:
        return self._add(Leaf(Const(c)))

    def gate(self, op: str, left: int, right: int) -> int:
        return self._add(Gate(op, left, right))

    def add(self, left: int, right: int) -> int:
        return self.gate("min", left, right)

    def mul(self, left: int, right: int) -> int:
        return self.gate("plus", left, right)

    def fold(self, op: str, ids: Sequence[int], balanced: bool = True) -> int:
        ids = list(ids)
        if not ids:
            return self.const(INF if op == "min" else 0)
        if not balanced:
            acc = ids[0]
            for nid in ids[1:]:
                acc = self.gate(op, acc, nid)
            return acc
        while len(ids) > 1:
            nxt = [self.gate(op, ids[k], ids[k + 1]) for k in range(0, len(ids) - 1, 2)]
            if len(ids) % 2:
                nxt.append(ids[-1])
            ids = nxt
        return ids[0]

    def sum(self, ids: Sequence[int], balanced: bool = True) -> int:
        return self.fold("min", ids, balanced)

    def prod(self, ids: Sequence[int], balanced: bool = True) -> int:
        return self.fold("plus", ids, balanced)

    def import_node(self, c: Circuit, root: int, leafmap=None, memo: dict | None = None) -> int:
        """Copy the sub-circuit of ``c`` at ``root``; ``leafmap`` may rewrite leaf labels."""
        memo = {} if memo is None else memo
        order = _postorder(c, root)
        for i in order:
            if i in memo:
                continue
            nd = c.nodes[i]
            if isinstance(nd, Leaf):
                lab = leafmap(nd.label) if leafmap else nd.label
                memo[i] = self.leaf(lab)
            else:
                memo[i] = self.gate(nd.op, memo[nd.left], memo[nd.right])
        return memo[root]

    def build(self, root: int) -> Circuit:
        return compact(Circuit(self.mode, self.arity, self.nodes, root))

    def build_formula(self, root: int, level_profile=None) -> Formula:
        c = compact(Circuit(self.mode, self.arity, self.nodes, root), tree=True)
        return Formula(c.mode, c.arity, c.nodes, c.root, level_profile)


def _postorder(c: Circuit, root: int) -> list[int]:
    out = []
    seen = set()
    stack = [(root, False)]
    while stack:
        i, done = stack.pop()
        if done:
            out.append(i)
            continue
        if i in seen:
            continue
        seen.add(i)
        stack.append((i, True))
        for ch in reversed(c.children(i)):
            if ch not in seen:
                stack.append((ch, False))
    return out


def compact(c: Circuit, tree: bool = False) -> Circuit:
    """Drop unreachable nodes and renumber; with ``tree`` shared nodes are duplicated."""
    nodes: list[Node] = []
    if tree:
        def emit(i: int) -> int:
            stack = [(i, False)]
            results: list[int] = []
            while stack:
                j, done = stack.pop()
                nd = c.nodes[j]
                if isinstance(nd, Leaf):
                    nodes.append(nd)
                    results.append(len(nodes) - 1)
                elif not done:
                    stack.append((j, True))
                    stack.append((nd.right, False))
                    stack.append((nd.left, False))
                else:
                    r = results.pop()
                    l = results.pop()
                    nodes.append(Gate(nd.op, l, r))
                    results.append(len(nodes) - 1)
            return results[0]

        root = emit(c.root)
        return Circuit(c.mode, c.arity, nodes, root)
    remap = {}
    for i in _postorder(c, c.root):
        nd = c.nodes[i]
        if isinstance(nd, Gate):
            nd = Gate(nd.op, remap[nd.left], remap[nd.right])
        nodes.append(nd)
        remap[i] = len(nodes) - 1
    return Circuit(c.mode, c.arity, nodes, remap[c.root])


def as_formula(c: Circuit, level_profile=None) -> Formula:
    t = compact(c, tree=True)
    return Formula(t.mode, t.arity, t.nodes, t.root, level_profile)


# -- ABPs ---------------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    layer: int
    src: int
    dst: int
    label: Label


class Abp:
    """Layered algebraic branching program."""

    def __init__(self, mode: Mode, arity: int, layers: Sequence[int], edges: Iterable[Edge], kind: str = "weakest"):
        self.mode = mode
        self.arity = arity
        self.layers = tuple(int(k) for k in layers)
        self.edges = tuple(edges)
        self.kind = kind
        if kind not in ("weakest", "general"):
            raise ValueError(f"unknown ABP kind {kind!r}")
        if not self.layers or any(k < 1 for k in self.layers):
            raise ValueError("every layer needs at least one vertex")
        for e in self.edges:
            if not 0 <= e.layer < len(self.layers) - 1:
                raise ValueError(f"edge layer {e.layer} out of range")
            if not (0 <= e.src < self.layers[e.layer] and 0 <= e.dst < self.layers[e.layer + 1]):
                raise ValueError(f"edge endpoint out of range in layer {e.layer}")
            lab = e.label
            if isinstance(lab, Var):
                if not 0 <= lab.index < arity:
                    raise ValueError(f"variable {lab.index} out of range")
            elif isinstance(lab, Const):
                check_value(lab.value, mode)
            elif isinstance(lab, Lin):
                if lab.poly.arity != arity or lab.poly.mode is not mode:
                    raise ValueError("linear-form label does not match the ABP space")
            else:
                raise ValueError("bad edge label")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Abp)
            and self.mode is other.mode
            and self.arity == other.arity
            and self.layers == other.layers
            and self.edges == other.edges
            and self.kind == other.kind
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.arity, self.layers, self.edges, self.kind))

    def __repr__(self) -> str:
        return f"Abp(mode={self.mode}, arity={self.arity}, layers={list(self.layers)}, edges={len(self.edges)})"

    @property
    def length(self) -> int:
        return len(self.layers) - 1

    @property
    def width(self) -> int:
        return max(self.layers)

    def edges_by_layer(self) -> list[list[Edge]]:
        out: list[list[Edge]] = [[] for _ in range(self.length)]
        for e in self.edges:
            out[e.layer].append(e)
        return out


Model = Union[Circuit, Abp]


# -- evaluation ---------------------------------------------------------------

def model_eval(m: Model, point: Sequence) -> TropValue:
    pt = check_point(point, m.arity, m.mode)
    if isinstance(m, Abp):
        return _abp_eval(m, pt)
    vals: dict[int, TropValue] = {}
    for i in _postorder(m, m.root):
        nd = m.nodes[i]
        if isinstance(nd, Leaf):
            vals[i] = label_eval(nd.label, pt)
        else:
            a, b = vals[nd.left], vals[nd.right]
            if nd.op == "min":
                vals[i] = b if a is INF else (a if b is INF or a <= b else b)
            else:
                vals[i] = INF if (a is INF or b is INF) else a + b
    return vals[m.root]


def _abp_eval(a: Abp, pt) -> TropValue:
    cur: list[TropValue] = [INF] * a.layers[0]
    cur[0] = 0
    for k, edges in enumerate(a.edges_by_layer()):
        nxt: list[TropValue] = [INF] * a.layers[k + 1]
        for e in edges:
            v = cur[e.src]
            if v is INF:
                continue
            w = label_eval(e.label, pt)
            if w is INF:
                continue
            s = v + w
            old = nxt[e.dst]
            if old is INF or s < old:
                nxt[e.dst] = s
        cur = nxt
    return cur[0]


def abp_paths(a: Abp) -> Iterable[list[Edge]]:
    """All source-to-sink paths (used only by small brute-force checks)."""
    by_layer = a.edges_by_layer()

    def walk(k: int, node: int, acc: list[Edge]):
        if k == a.length:
            if node == 0:
                yield list(acc)
            return
        for e in by_layer[k]:
            if e.src == node:
                acc.append(e)
                yield from walk(k + 1, e.dst, acc)
                acc.pop()

    yield from walk(0, 0, [])


# -- symbolic expansion -------------------------------------------------------

def expand(m: Model, max_terms: int | None = 100_000, memo: dict | None = None) -> TropPoly:
    """Canonical polynomial computed by ``m``.

    Passing the same ``memo`` to several calls (same mode and arity) shares
    the expansions of structurally identical subtrees between them.
    """
    if isinstance(m, Abp):
        return _abp_expand(m, max_terms)
    # Structurally identical subtrees (common in copied formulas) expand once.
    keys: dict[int, int] = {}
    if memo is None:
        memo = {}
    if memo.setdefault("space", (m.mode, m.arity)) != (m.mode, m.arity):
        raise ValueError("memo was built for a different mode or arity")
    key_of: dict[object, int] = memo.setdefault("keys", {})
    vals: dict[int, TropPoly] = memo.setdefault("vals", {})
    for i in _postorder(m, m.root):
        nd = m.nodes[i]
        sig = nd.label if isinstance(nd, Leaf) else (nd.op, keys[nd.left], keys[nd.right])
        k = key_of.get(sig)
        if k is None:
            k = key_of[sig] = len(key_of)
            if isinstance(nd, Leaf):
                val = label_poly(nd.label, m.mode, m.arity)
            elif nd.op == "min":
                val = poly_sum([vals[keys[nd.left]], vals[keys[nd.right]]], m.mode, m.arity, max_terms)
            else:
                val = poly_mul(vals[keys[nd.left]], vals[keys[nd.right]], max_terms)
            if max_terms is not None and len(val) > max_terms:
                raise BudgetExceeded(f"expansion exceeded {max_terms} terms")
            vals[k] = val
        keys[i] = k
    return vals[keys[m.root]]


def _abp_expand(a: Abp, max_terms) -> TropPoly:
    empty = TropPoly.empty(a.mode, a.arity)
    cur = [empty] * a.layers[0]
    cur[0] = TropPoly.constant(a.mode, a.arity, 0)
    for k, edges in enumerate(a.edges_by_layer()):
        parts: list[list[TropPoly]] = [[] for _ in range(a.layers[k + 1])]
        for e in edges:
            if not cur[e.src]:
                continue
            lab = label_poly(e.label, a.mode, a.arity)
            if not lab:
                continue
            parts[e.dst].append(poly_mul(cur[e.src], lab, max_terms))
        cur = [poly_sum(p, a.mode, a.arity, max_terms) if p else empty for p in parts]
    return cur[0]


# -- validation and statistics -------------------------------------------------

def validate(m: Model) -> list[str]:
    out: list[str] = []
    if isinstance(m, Abp):
        seen = set()
        for e in m.edges:
            key = (e.layer, e.src, e.dst)
            if key in seen:
                out.append(f"parallel edges in layer {e.layer} from {e.src} to {e.dst}")
            seen.add(key)
            if m.kind == "weakest" and isinstance(e.label, Lin):
                out.append(f"linear-form label on weakest ABP edge in layer {e.layer}")
        return out
    if isinstance(m, Formula):
        fo = m.fanout()
        for i, f in enumerate(fo):
            if f > 1:
                out.append(f"node {i} has fan-out {f} in a formula")
        if m.level_profile is not None:
            prof = alternation_profile(m)
            if prof is None:
                out.append("formula does not alternate strictly with ⊗ at the bottom")
            elif len(prof) != len(m.level_profile):
                out.append(f"level profile has {len(m.level_profile)} levels, formula has {len(prof)}")
    return out


def depth(m: Model) -> int:
    if isinstance(m, Abp):
        return m.length
    d: dict[int, int] = {}
    for i in _postorder(m, m.root):
        ch = m.children(i)
        d[i] = 0 if not ch else 1 + max(d[c] for c in ch)
    return d[m.root]


def size(m: Model) -> int:
    if isinstance(m, Abp):
        return sum(m.layers) + len(m.edges)
    return len(m.nodes)


def nary_children(c: Circuit, i: int) -> list[int]:
    """Children of the maximal same-op chain rooted at gate ``i``."""
    nd = c.nodes[i]
    out: list[int] = []
    stack = [nd.right, nd.left]
    while stack:
        j = stack.pop()
        ch = c.nodes[j]
        if isinstance(ch, Gate) and ch.op == nd.op:
            stack.append(ch.right)
            stack.append(ch.left)
        else:
            out.append(j)
    return out


def is_identity_leaf(c: Circuit, j: int, op: str) -> bool:
    nd = c.nodes[j]
    if not isinstance(nd, Leaf) or not isinstance(nd.label, Const):
        return False
    v = nd.label.value
    if op == "min":
        return v is INF
    return v is not INF and v == 0


def alternation_profile(c: Circuit) -> tuple[int, ...] | None:
    """Per-level maximum fan-in of the collapsed tree, bottom level first.

    Identity constants (0 under ⊗, ∞ under ⊕) are padding and do not count.
    Returns None if the collapsed tree does not alternate with ⊗ at the
    bottom and every leaf directly under a level-1 gate.
    """
    root = c.root
    if isinstance(c.nodes[root], Leaf):
        return ()
    levels: dict[int, int] = {}

    def height(i: int) -> int | None:
        nd = c.nodes[i]
        if isinstance(nd, Leaf):
            return 0
        kids = [j for j in nary_children(c, i) if not is_identity_leaf(c, j, nd.op)]
        if not kids:
            kids = [nary_children(c, i)[0]]
        hs = []
        for j in kids:
            h = height(j)
            if h is None:
                return None
            hs.append(h)
        h = max(hs) + 1
        if any(x != h - 1 for x in hs):
            return None
        if (h % 2 == 1) != (nd.op == "plus"):
            return None
        levels[h] = max(levels.get(h, 0), len(kids))
        return h

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * len(c.nodes) + 100))
    try:
        top = height(root)
    finally:
        sys.setrecursionlimit(old)
    if top is None:
        return None
    return tuple(levels[h] for h in range(1, top + 1))


def stats(m: Model) -> dict:
    out = {"kind": "abp" if isinstance(m, Abp) else m.kind, "size": size(m), "depth": depth(m)}
    if isinstance(m, Abp):
        out.update(
            width=m.width,
            vertices=sum(m.layers),
            edges=len(m.edges),
            layers=len(m.layers),
            length=m.length,
        )
    else:
        out["width"] = None
        prof = getattr(m, "level_profile", None) or alternation_profile(m)
        if prof is not None:
            out["alternation"] = (len(prof), tuple(prof))
        else:
            out["alternation"] = None
    return out


# -- matrix view --------------------------------------------------------------

Matrix = list[list[Union[Label, None]]]


def abp_to_matrices(a: Abp) -> list[Matrix]:
    k = a.width
    mats = [[[None] * k for _ in range(k)] for _ in range(a.length)]
    for e in a.edges:
        if mats[e.layer][e.src][e.dst] is not None:
            raise ValueError("parallel edges cannot be represented in matrix form")
        mats[e.layer][e.src][e.dst] = e.label
    return mats


def matrices_to_abp(ms: Sequence[Matrix], mode: Mode, arity: int, kind: str | None = None) -> Abp:
    if not ms:
        return Abp(mode, arity, [1], [], kind or "weakest")
    k = len(ms[0])
    edges = []
    general = False
    for li, m in enumerate(ms):
        if len(m) != k or any(len(row) != k for row in m):
            raise ValueError("all matrices must be square of the same dimension")
        for i, row in enumerate(m):
            for j, lab in enumerate(row):
                if lab is None or (isinstance(lab, Const) and lab.value is INF):
                    continue
                general = general or isinstance(lab, Lin)
                edges.append(Edge(li, i, j, lab))
    return Abp(mode, arity, [k] * (len(ms) + 1), edges, kind or ("general" if general else "weakest"))


def pad_abp(a: Abp, width: int | None = None) -> Abp:
    w = a.width if width is None else width
    if w < a.width:
        raise ValueError("cannot pad to a smaller width")
    return Abp(a.mode, a.arity, [w] * len(a.layers), a.edges, a.kind)


def abp_concat(a: Abp, b: Abp) -> Abp:
    """Identify the last layer of ``a`` with the first layer of ``b`` vertex by vertex."""
    if a.mode is not b.mode or a.arity != b.arity:
        raise ValueError("concatenated ABPs must share mode and arity")
    joint = max(a.layers[-1], b.layers[0])
    layers = list(a.layers[:-1]) + [joint] + list(b.layers[1:])
    off = a.length
    edges = list(a.edges) + [Edge(e.layer + off, e.src, e.dst, e.label) for e in b.edges]
    kind = "general" if "general" in (a.kind, b.kind) else "weakest"
    return Abp(a.mode, a.arity, layers, edges, kind)


def abp_concat_all(parts: Sequence[Abp]) -> Abp:
    out = parts[0]
    for p in parts[1:]:
        out = abp_concat(out, p)
    return out


def abp_trim(a: Abp) -> Abp:
    """Keep only the source in the first layer and the sink in the last layer."""
    last = a.length
    edges = [
        e
        for e in a.edges
        if not (e.layer == 0 and e.src != 0) and not (e.layer == last - 1 and e.dst != 0)
    ]
    layers = list(a.layers)
    layers[0] = 1
    layers[-1] = 1
    if len(layers) == 1:
        layers = [1]
    return Abp(a.mode, a.arity, layers, edges, a.kind)


def abp_prune(a: Abp) -> Abp:
    """Drop edges and vertices not on any source-to-sink path; renumbers vertices."""
    L = len(a.layers)
    by_layer = a.edges_by_layer()
    fwd = [set() for _ in range(L)]
    fwd[0].add(0)
    for k in range(L - 1):
        for e in by_layer[k]:
            if e.src in fwd[k]:
                fwd[k + 1].add(e.dst)
    bwd = [set() for _ in range(L)]
    bwd[-1].add(0)
    for k in range(L - 2, -1, -1):
        for e in by_layer[k]:
            if e.dst in bwd[k + 1]:
                bwd[k].add(e.src)
    live = [sorted(fwd[k] & bwd[k]) for k in range(L)]
    if not live[0] or 0 not in live[0]:
        # Nothing reaches the sink: a single layer pair with no edges computes ∞.
        return Abp(a.mode, a.arity, [1, 1], [], a.kind) if L > 1 else a
    maps = []
    for k in range(L):
        order = live[k]
        # Keep source and sink at index 0.
        mp = {v: idx for idx, v in enumerate(order)}
        maps.append(mp)
    edges = [
        Edge(e.layer, maps[e.layer][e.src], maps[e.layer + 1][e.dst], e.label)
        for e in a.edges
        if e.src in maps[e.layer] and e.dst in maps[e.layer + 1]
    ]
    return Abp(a.mode, a.arity, [len(l) for l in live], edges, a.kind)


def abp_to_circuit(a: Abp) -> Circuit:
    """Layer-by-layer relaxation written out as a circuit."""
    if a.kind != "weakest":
        raise ValueError("only weakest ABPs convert to circuits directly")
    b = CircuitBuilder(a.mode, a.arity, share=True)
    cur: list[int | None] = [None] * a.layers[0]
    cur[0] = b.const(0)
    for k, edges in enumerate(a.edges_by_layer()):
        incoming: list[list[int]] = [[] for _ in range(a.layers[k + 1])]
        for e in edges:
            if cur[e.src] is None:
                continue
            if isinstance(e.label, Const) and e.label.value is INF:
                continue
            incoming[e.dst].append(b.mul(cur[e.src], b.leaf(e.label)))
        cur = [b.sum(ins) if ins else None for ins in incoming]
    root = cur[0] if cur[0] is not None else b.const(INF)
    return simplify(b.build(root))


# -- substitution and simplification ------------------------------------------

def substitute(c: Circuit, mapping: Sequence[Atom], arity: int) -> Circuit:
    """Replace variable ``i`` by ``mapping[i]`` (a Var in the new space or a Const)."""
    if len(mapping) != c.arity:
        raise ValueError("substitution must cover every variable")

    def relabel(lab: Atom) -> Atom:
        return mapping[lab.index] if isinstance(lab, Var) else lab

    b = CircuitBuilder(c.mode, arity)
    root = b.import_node(c, c.root, relabel)
    out = simplify(Circuit(c.mode, arity, b.nodes, root))
    if isinstance(c, Formula):
        return as_formula(out)
    return out


def simplify(c: Circuit) -> Circuit:
    """Fold constants and drop identity operands; keeps formulas tree-shaped."""
    b = CircuitBuilder(c.mode, c.arity)
    memo: dict[int, int] = {}
    consts: dict[int, TropValue] = {}
    for i in _postorder(c, c.root):
        nd = c.nodes[i]
        if isinstance(nd, Leaf):
            memo[i] = b.leaf(nd.label)
            if isinstance(nd.label, Const):
                consts[memo[i]] = nd.label.value
            continue
        l, r = memo[nd.left], memo[nd.right]
        cl, cr = consts.get(l), consts.get(r)
        if nd.op == "plus":
            if cl is INF or cr is INF:
                memo[i] = b.const(INF)
                consts[memo[i]] = INF
            elif cl is not None and cr is not None:
                memo[i] = b.const(cl + cr)
                consts[memo[i]] = cl + cr
            elif cl == 0 and cl is not None:
                memo[i] = r
            elif cr == 0 and cr is not None:
                memo[i] = l
            else:
                memo[i] = b.mul(l, r)
        else:
            if cl is INF:
                memo[i] = r
            elif cr is INF:
                memo[i] = l
            elif cl is not None and cr is not None:
                v = cl if cl <= cr else cr
                memo[i] = b.const(v)
                consts[memo[i]] = v
            else:
                memo[i] = b.add(l, r)
    res = compact(Circuit(c.mode, c.arity, b.nodes, memo[c.root]))
    if isinstance(c, Formula):
        return as_formula(res)
    return res
