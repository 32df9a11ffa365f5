"""Alternating formulas to width-(2p+1) ABPs via format matrices.

A value f "in level-i format" is a sequence of (2p+1)x(2p+1) weakest label
matrices whose product has f at (0,0), zeros on the anti-diagonal positions
(k, 2p+1-i-k+1)... and infinity everywhere else.  Gates are compiled bottom-up:

* level-1 product:  M_1(f) . diag(x, 0, ..., 0) = M_1(f x)
* level-i product:  M_i(f) . Pc . M_{i-1}(g)^T = M_i(f g)
* level-i sum:      M_i(f) . Pr . M_{i-1}(g) . T Pc' = M_i(f + g)

where the P and T factors are 0/infinity matrices.  The transpose of a
sequence is the reversed sequence of transposes.  A final peephole pass
multiplies adjacent matrices whenever the product is still a legal weakest
layer, which shrinks the constant-matrix glue.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Union

from ..models import (
    Abp,
    CircuitBuilder,
    Const,
    Edge,
    Formula,
    Leaf,
    Var,
    alternation_profile,
    is_identity_leaf,
    nary_children,
)
from ..poly import BudgetExceeded
from ..semiring import INF, TropValue

# -- n-ary trees ---------------------------------------------------------------


@dataclass
class NLeaf:
    label: Union[Var, Const]


@dataclass
class NGate:
    op: str
    kids: list


def to_nary(f: Formula, drop_identities: bool = True):
    """Collapse same-op chains into n-ary gates; identity constants are dropped."""

    def rec(i: int):
        nd = f.nodes[i]
        if isinstance(nd, Leaf):
            return NLeaf(nd.label)
        kids = []
        for j in nary_children(f, i):
            if drop_identities and is_identity_leaf(f, j, nd.op):
                continue
            k = rec(j)
            if isinstance(k, NGate) and k.op == nd.op:
                kids.extend(k.kids)
            else:
                kids.append(k)
        if not kids:
            return NLeaf(Const(0 if nd.op == "plus" else INF))
        if len(kids) == 1 and drop_identities:
            return kids[0]
        return NGate(nd.op, kids)

    with _deep_recursion(len(f.nodes)):
        return rec(f.root)


class _deep_recursion:
    def __init__(self, n: int):
        self.n = n

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, 20 * self.n + 1000))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


def nary_height(t) -> int:
    if isinstance(t, NLeaf):
        return 0
    return 1 + max(nary_height(k) for k in t.kids)


# -- normalization ---------------------------------------------------------------


def normalize_alternating(f: Formula, p: int) -> Formula:
    """Rewrite ``f`` with exactly 2p alternating levels, product gates at level 1."""
    if p < 1:
        raise ValueError("p must be positive")
    top = 2 * p
    tree = to_nary(f)
    if isinstance(tree, NLeaf) or tree.op == "plus":
        tree = NGate("min", [tree])
    fanin = [0] * (top + 1)
    b = CircuitBuilder(f.mode, f.arity)

    def op_at(level: int) -> str:
        return "plus" if level % 2 == 1 else "min"

    def pad(node_id: int, level: int) -> int:
        # Identity operands stand in for fan-in-1 gates.
        if op_at(level) == "plus":
            return b.mul(node_id, b.const(0))
        return b.add(node_id, b.const(INF))

    def emit(t, level: int) -> int:
        if isinstance(t, NLeaf):
            nid = b.leaf(t.label)
            for lv in range(1, level + 1):
                fanin[lv] = max(fanin[lv], 1)
                nid = pad(nid, lv)
            return nid
        if level < 1:
            raise ValueError(f"formula needs more than {top} alternating levels")
        if t.op != op_at(level):
            raise ValueError("internal: alternation mismatch")
        kids = [emit(k, level - 1) for k in t.kids]
        fanin[level] = max(fanin[level], len(kids))
        if len(kids) == 1:
            return pad(kids[0], level)
        return b.fold(t.op, kids)

    with _deep_recursion(len(f.nodes)):
        root = emit(tree, top)
    return b.build_formula(root, tuple(fanin[1:]))


# -- symbolic weakest matrices -------------------------------------------------

# An entry is a dict mapping a variable index (or None for the constant term)
# to its best constant.  A legal weakest label is one constant term or a
# single variable with constant 0.

Entry = dict
SMatrix = dict  # (row, col) -> Entry


def _atom_entry(label) -> Entry:
    if isinstance(label, Var):
        return {label.index: 0}
    return {None: label.value}


def _legal(entry: Entry) -> bool:
    if len(entry) != 1:
        return False
    (k, v), = entry.items()
    return k is None or v == 0


def _entry_label(entry: Entry):
    (k, v), = entry.items()
    return Const(v) if k is None else Var(k)


def _mul_entries(a: Entry, b: Entry) -> Entry | None:
    out: Entry = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            if k1 is not None and k2 is not None:
                return None
            k = k1 if k1 is not None else k2
            v = v1 + v2
            old = out.get(k)
            if old is None or v < old:
                out[k] = v
    return out


def smat_mul(A: SMatrix, B: SMatrix) -> SMatrix | None:
    """Product if every entry is still a legal weakest label, else None."""
    rows: dict[int, list] = {}
    for (r, c), e in B.items():
        rows.setdefault(r, []).append((c, e))
    out: dict[tuple[int, int], Entry] = {}
    for (r, k), e1 in A.items():
        for c, e2 in rows.get(k, ()):
            prod = _mul_entries(e1, e2)
            if prod is None:
                return None
            cur = out.get((r, c))
            if cur is None:
                out[(r, c)] = prod
            else:
                for key, v in prod.items():
                    old = cur.get(key)
                    if old is None or v < old:
                        cur[key] = v
    for e in out.values():
        if not _legal(e):
            return None
    return out


def _transpose(A: SMatrix) -> SMatrix:
    return {(c, r): e for (r, c), e in A.items()}


def _perm(n: int, pi: dict[int, int]) -> SMatrix:
    return {(j, pi.get(j, j)): {None: 0} for j in range(n)}


class FormatMatrices:
    """Level-indexed templates for a fixed p."""

    def __init__(self, p: int):
        self.p = p
        self.n = 2 * p + 1

    def format(self, level: int, label) -> SMatrix:
        p = self.p
        m: SMatrix = {}
        if not (isinstance(label, Const) and label.value is INF):
            m[(0, 0)] = _atom_entry(label)
        for k in range(1, 2 * p + 2 - level):
            m[(k - 1, 2 * p + 2 - level - k)] = {None: 0}
        return m

    def diag(self, label) -> SMatrix:
        m = {(j, j): {None: 0} for j in range(1, self.n)}
        if not (isinstance(label, Const) and label.value is INF):
            m[(0, 0)] = _atom_entry(label)
        return m

    def prod_glue(self, level: int) -> SMatrix:
        # Reverse columns 1 .. 2p+1-level.
        hi = 2 * self.p + 1 - level
        return _perm(self.n, {j: hi + 1 - j for j in range(1, hi + 1)})

    def sum_rows(self, level: int) -> SMatrix:
        # Reverse rows 0 .. 2p+1-level.
        hi = 2 * self.p + 1 - level
        return _perm(self.n, {r: hi - r for r in range(hi + 1)})

    def sum_cols(self, level: int) -> SMatrix:
        # Col0 <- Col0 + Col1, kill Col1, then rotate columns 1 .. 2p+2-level.
        n = self.n
        hi = 2 * self.p + 2 - level
        T: SMatrix = {(0, 0): {None: 0}, (1, 0): {None: 0}}
        for j in range(2, n):
            T[(j, j)] = {None: 0}
        pi = {1: hi}
        for c in range(2, hi + 1):
            pi[c] = c - 1
        out = smat_mul(T, _perm(n, pi))
        assert out is not None
        return out


def _compile(tree, level: int, fm: FormatMatrices, out: list, budget: int | None) -> None:
    """Append matrices whose product is ``tree`` in level format."""
    if budget is not None and len(out) > budget:
        raise BudgetExceeded(f"format-matrix sequence exceeded {budget} matrices")
    if isinstance(tree, NLeaf):
        out.append(fm.format(level, tree.label))
        return
    if level < 1:
        raise ValueError("gate below level 1")
    op = "plus" if level % 2 == 1 else "min"
    if tree.op != op:
        raise ValueError(f"level {level} expects {op} gates")
    out.append(fm.format(level, Const(0 if op == "plus" else INF)))
    for kid in tree.kids:
        if level == 1:
            if not isinstance(kid, NLeaf):
                raise ValueError("level-1 product gates take leaves only")
            out.append(fm.diag(kid.label))
        elif op == "plus":
            out.append(fm.prod_glue(level))
            sub: list = []
            _compile(kid, level - 1, fm, sub, budget)
            out.extend(_transpose(m) for m in reversed(sub))
        else:
            out.append(fm.sum_rows(level))
            _compile(kid, level - 1, fm, out, budget)
            out.append(fm.sum_cols(level))


def merge_matrices(seq: list[SMatrix]) -> list[SMatrix]:
    """Greedily multiply neighbours while the product stays a weakest layer."""
    out: list[SMatrix] = []
    cur = None
    for m in seq:
        if cur is None:
            cur = m
            continue
        prod = smat_mul(cur, m)
        if prod is not None:
            cur = prod
        else:
            out.append(cur)
            cur = m
    if cur is not None:
        out.append(cur)
    return out


def _levels_tree(f: Formula):
    """n-ary tree of a normalized formula, keeping padding gates honest."""
    if f.level_profile is None:
        raise ValueError("formula is not normalized: run normalize_alternating first")
    top = len(f.level_profile)
    if top % 2 or top < 2:
        raise ValueError("level profile must have an even, positive number of levels")
    tree = to_nary(f)
    if isinstance(tree, NLeaf) or tree.op == "plus":
        tree = NGate("min", [tree])
    if nary_height(tree) > top:
        raise ValueError("formula is deeper than its level profile")
    return tree, top // 2


def alt_formula_to_abp(f: Formula, max_matrices: int | None = 1_000_000) -> Abp:
    """Width-(2p+1) weakest ABP computing the normalized formula ``f``."""
    tree, p = _levels_tree(f)
    fm = FormatMatrices(p)
    seq: list[SMatrix] = []
    with _deep_recursion(len(f.nodes)):
        _check_levels(tree, 2 * p)
        _compile(tree, 2 * p, fm, seq, max_matrices)
    seq = merge_matrices(seq)
    n = fm.n
    edges = []
    for li, m in enumerate(seq):
        for (r, c), e in sorted(m.items(), key=lambda kv: kv[0]):
            lab = _entry_label(e)
            if isinstance(lab, Const) and lab.value is INF:
                continue
            edges.append(Edge(li, r, c, lab))
    return Abp(f.mode, f.arity, [n] * (len(seq) + 1), edges, "weakest")


def _check_levels(tree, level: int) -> None:
    if isinstance(tree, NLeaf):
        return
    op = "plus" if level % 2 == 1 else "min"
    if level < 1 or tree.op != op:
        raise ValueError("formula does not match its alternating level profile")
    for k in tree.kids:
        _check_levels(k, level - 1)


def sequence_value_check(seq: list[SMatrix], point, n: int) -> TropValue:
    """Numeric product entry (0,0); used by tests to cross-check the templates."""
    vec: dict[int, TropValue] = {0: 0}
    for m in seq:
        nxt: dict[int, TropValue] = {}
        for (r, c), e in m.items():
            if r not in vec:
                continue
            best = INF
            for k, v in e.items():
                w = v if k is None else point[k] + v
                if best is INF or w < best:
                    best = w
            if best is INF:
                continue
            s = vec[r] + best
            if c not in nxt or s < nxt[c]:
                nxt[c] = s
        vec = nxt
    return vec.get(0, INF)


__all__ = [
    "normalize_alternating",
    "alt_formula_to_abp",
    "merge_matrices",
    "FormatMatrices",
    "to_nary",
    "NLeaf",
    "NGate",
    "alternation_profile",
]
