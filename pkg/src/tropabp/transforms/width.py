"""ABPs to depth-2p alternating formulas, and width reduction through them.

The formula follows the shortest-path recurrence on the layered DAG: the
cheapest path between two vertices ``length`` layers apart is the minimum,
over guessed vertices at r-1 evenly spaced cut layers, of the product of the
cheapest sub-paths.  After p-1 levels of guessing the remaining blocks are
short and are written out as a sum over their explicit paths.  In a layered
DAG walks are paths, so the recurrence is exact in both modes.
"""

from __future__ import annotations


from ..models import Abp, CircuitBuilder, Formula, Lin
from ..poly import BudgetExceeded
from ..semiring import INF
from .alternating import alt_formula_to_abp, normalize_alternating


def _block_count(length: int, p: int) -> int:
    """Smallest r with r**p >= length."""
    if length <= 1:
        return 1
    r = max(1, int(round(length ** (1.0 / p))))
    while r**p < length:
        r += 1
    while r > 1 and (r - 1) ** p >= length:
        r -= 1
    return r


def abp_to_alt_formula(a: Abp, p: int, max_size: int | None = 1_000_000) -> Formula:
    """Depth-2p ⊕⊗ alternating formula computing the same polynomial as ``a``."""
    if p < 1:
        raise ValueError("p must be positive")
    if a.kind != "weakest" or any(isinstance(e.label, Lin) for e in a.edges):
        raise ValueError("only weakest ABPs are supported")
    L = a.length
    r = _block_count(L, p)
    by_layer = a.edges_by_layer()
    out_edges = [dict() for _ in range(L)]
    for k, es in enumerate(by_layer):
        for e in es:
            out_edges[k].setdefault(e.src, []).append(e)

    # reach[k][v]: set of vertices of later layers reachable from (k, v) is
    # computed lazily per block to prune empty guesses.
    reach_cache: dict[tuple[int, int, int], frozenset] = {}

    def reach(k0: int, v: int, k1: int) -> frozenset:
        key = (k0, v, k1)
        got = reach_cache.get(key)
        if got is not None:
            return got
        cur = {v}
        for k in range(k0, k1):
            nxt = set()
            for u in cur:
                for e in out_edges[k].get(u, ()):
                    nxt.add(e.dst)
            cur = nxt
        got = frozenset(cur)
        reach_cache[key] = got
        return got

    b = CircuitBuilder(a.mode, a.arity)
    count = [0]

    def charge(n: int) -> None:
        count[0] += n
        if max_size is not None and count[0] > max_size:
            raise BudgetExceeded(f"alternating formula exceeded {max_size} nodes")

    def paths(k0: int, u: int, k1: int, v: int) -> list[list]:
        out: list[list] = []

        def walk(k: int, node: int, acc: list) -> None:
            if k == k1:
                if node == v:
                    out.append(list(acc))
                return
            for e in out_edges[k].get(node, ()):
                if v in reach(k + 1, e.dst, k1):
                    acc.append(e.label)
                    walk(k + 1, e.dst, acc)
                    acc.pop()

        walk(k0, u, [])
        return out

    def block(k0: int, u: int, k1: int, v: int, level: int) -> int | None:
        """Formula for paths (k0,u) -> (k1,v) with ``level`` ⊕⊗ pairs, or None if none."""
        if v not in reach(k0, u, k1):
            return None
        if level == 1 or k1 - k0 <= 1:
            terms = []
            for labels in paths(k0, u, k1, v):
                if not labels:
                    terms.append(b.const(0))
                    charge(1)
                    continue
                leaves = [b.leaf(lab) for lab in labels]
                charge(2 * len(leaves) - 1)
                terms.append(b.prod(leaves))
            charge(max(0, len(terms) - 1))
            return b.sum(terms)
        span = k1 - k0
        cuts = sorted({k0 + (t * span) // r for t in range(1, r)} - {k0, k1})
        bounds = [k0] + cuts + [k1]
        terms = []

        def guess(idx: int, node: int, acc: list[int]) -> None:
            if idx == len(bounds) - 1:
                terms.append(b.prod(acc))
                charge(max(0, len(acc) - 1))
                return
            lo, hi = bounds[idx], bounds[idx + 1]
            if hi == k1:
                sub = block(lo, node, hi, v, level - 1)
                if sub is not None:
                    guess(idx + 1, v, acc + [sub])
                return
            targets = sorted(w for w in reach(lo, node, hi) if v in reach(hi, w, k1))
            for w in targets:
                sub = block(lo, node, hi, w, level - 1)
                if sub is not None:
                    guess(idx + 1, w, acc + [sub])

        guess(0, u, [])
        if not terms:
            return None
        charge(len(terms) - 1)
        return b.sum(terms)

    if L == 0:
        root = b.const(0)
    else:
        root = block(0, 0, L, 0, p)
        if root is None:
            root = b.const(INF)
    return b.build_formula(root)


def abp_width_reduce(a: Abp, p: int, max_size: int | None = 1_000_000) -> Abp:
    """Width-(2p+1) ABP computing the same polynomial as ``a``."""
    f = abp_to_alt_formula(a, p, max_size)
    g = normalize_alternating(f, p)
    return alt_formula_to_abp(g, max_matrices=max_size)


def guess_levels(length: int, p: int) -> tuple[int, int]:
    """(r, number of cut layers per split) used for an ABP of the given length."""
    r = _block_count(length, p)
    return r, max(0, r - 1)


__all__ = ["abp_to_alt_formula", "abp_width_reduce", "guess_levels"]
