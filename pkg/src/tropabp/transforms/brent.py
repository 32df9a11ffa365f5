"""Logarithmic-depth rebalancing of formulas over R⁺.

A formula F with a chosen subformula F_v is affine in F_v: F = (A ⊗ F_v) ⊕ B.
Setting F_v to 0 gives A ⊕ B and setting it to ∞ gives B.  Over R⁺ the term
B ⊗ F_v is absorbed by B, so F = (F[v:=0] ⊗ F_v) ⊕ F[v:=∞].  Recursing on the
three pieces, each at most about two thirds of the input, gives depth
O(log s) and size s^O(1).
"""

from __future__ import annotations

import math

from ..models import CircuitBuilder, Formula, Leaf, _postorder, depth, simplify
from ..semiring import INF, Mode

DEPTH_C = 8


def depth_bound(s: int) -> float:
    """Target depth C·log2(s) + C."""
    return DEPTH_C * math.log2(max(s, 1)) + DEPTH_C


def _subtree_sizes(f: Formula) -> dict[int, int]:
    sub: dict[int, int] = {}
    for i in _postorder(f, f.root):
        nd = f.nodes[i]
        sub[i] = 1 if isinstance(nd, Leaf) else 1 + sub[nd.left] + sub[nd.right]
    return sub


def split_node(f: Formula) -> int:
    """First node with subtree size ≤ 2s/3 on the heavy-child walk (ties go left)."""
    sub = _subtree_sizes(f)
    s = sub[f.root]
    v = f.root
    while 3 * sub[v] > 2 * s:
        nd = f.nodes[v]
        v = nd.left if sub[nd.left] >= sub[nd.right] else nd.right
    return v


def _extract(f: Formula, v: int) -> Formula:
    b = CircuitBuilder(f.mode, f.arity)
    return b.build_formula(b.import_node(f, v))


def _replace(f: Formula, v: int, value) -> Formula:
    b = CircuitBuilder(f.mode, f.arity)
    memo = {v: b.const(value)}
    root = b.import_node(f, f.root, memo=memo)
    return simplify(b.build_formula(root))


def brent_depth_reduce(f: Formula, trace: list | None = None) -> Formula:
    """Equivalent formula of depth ≤ 8·log2(s) + 8.

    Subformulas already within the bound for their own size are kept as they
    are.  When ``trace`` is a list, each split appends (F[v:=∞], F_v).
    """
    if f.mode is not Mode.RPLUS:
        raise ValueError("depth reduction is only sound over R⁺")
    out = CircuitBuilder(f.mode, f.arity)

    def rec(g: Formula) -> int:
        s = len(g.nodes)
        if depth(g) <= depth_bound(s):
            return out.import_node(g, g.root)
        v = split_node(g)
        fv = _extract(g, v)
        f0 = _replace(g, v, 0)
        finf = _replace(g, v, INF)
        if trace is not None:
            trace.append((finf, fv))
        left = out.mul(rec(f0), rec(fv))
        return out.add(left, rec(finf))

    return out.build_formula(rec(f))


__all__ = ["brent_depth_reduce", "depth_bound", "split_node", "DEPTH_C"]
