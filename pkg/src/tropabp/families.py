"""Generators for named polynomial families.

Matrix families use row-major variables: x_{i,j} is variable i·n + j (0-based).
Graph families use one variable per edge, in edge-list order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .poly import BudgetExceeded, TropPoly
from .semiring import Mode

MAX_N = 6


@dataclass(frozen=True)
class CostGraph:
    """Simple graph whose edge k carries cost variable k."""

    n: int
    directed: bool
    edges: tuple[tuple[int, int], ...]
    s: int | None = None
    t: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            key = (u, v) if self.directed else frozenset((u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    @property
    def arity(self) -> int:
        return len(self.edges)


def complete_graph(n: int) -> CostGraph:
    return CostGraph(n, False, tuple(itertools.combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> CostGraph:
    """K_{a,b} with vertices 0..a-1 on one side and a..a+b-1 on the other."""
    return CostGraph(a + b, False, tuple((u, a + v) for u in range(a) for v in range(b)))


def _mono(arity: int, idx) -> tuple[int, ...]:
    e = [0] * arity
    for i in idx:
        e[i] += 1
    return tuple(e)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_N:
        raise BudgetExceeded(f"n = {n} exceeds the enumeration limit {MAX_N}")


def perm_poly(n: int, mode: Mode = Mode.RPLUS) -> TropPoly:
    """⊕ over permutations σ of ⊗_i x_{i,σ(i)}."""
    _check_n(n)
    terms = {_mono(n * n, [i * n + s[i] for i in range(n)]): 0 for s in itertools.permutations(range(n))}
    return TropPoly(mode, n * n, terms)


def cyclic_permutations(n: int):
    """Permutations of 0..n-1 that form a single n-cycle."""
    for rest in itertools.permutations(range(1, n)):
        cyc = (0,) + rest
        s = [0] * n
        for k in range(n):
            s[cyc[k]] = cyc[(k + 1) % n]
        yield tuple(s)


def hc_poly(n: int, mode: Mode = Mode.RPLUS) -> TropPoly:
    """⊕ over n-cycles σ of ⊗_i x_{i,σ(i)}."""
    _check_n(n)
    if n < 2:
        raise ValueError("hc_poly needs n >= 2")
    terms = {_mono(n * n, [i * n + s[i] for i in range(n)]): 0 for s in cyclic_permutations(n)}
    return TropPoly(mode, n * n, terms)


def simple_paths(g: CostGraph, s: int, t: int, budget: int = 100_000):
    """Edge-index lists of the simple s-t paths."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(g.n)}
    for k, (u, v) in enumerate(g.edges):
        adj[u].append((v, k))
        if not g.directed:
            adj[v].append((u, k))
    out: list[list[int]] = []
    visited = {s}

    def walk(v: int, acc: list[int]) -> None:
        if v == t:
            out.append(list(acc))
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} paths")
            return
        for w, k in adj[v]:
            if w not in visited:
                visited.add(w)
                acc.append(k)
                walk(w, acc)
                acc.pop()
                visited.discard(w)

    walk(s, [])
    return out


def shortest_path_poly(g: CostGraph, s: int | None = None, t: int | None = None, mode: Mode = Mode.RPLUS, budget: int = 100_000) -> TropPoly:
    """One monomial per simple s-t path."""
    s = g.s if s is None else s
    t = g.t if t is None else t
    if s is None or t is None:
        raise ValueError("shortest_path_poly needs s and t")
    if s == t:
        return TropPoly.constant(mode, g.arity, 0)
    return TropPoly(mode, g.arity, {_mono(g.arity, p): 0 for p in simple_paths(g, s, t, budget)})


def k_matching_poly(g: CostGraph, k: int, mode: Mode = Mode.RPLUS, budget: int = 100_000) -> TropPoly:
    """One monomial per set of k pairwise disjoint edges."""
    if math.comb(g.arity, k) > budget:
        raise BudgetExceeded(f"C({g.arity}, {k}) edge subsets exceed the budget {budget}")
    terms = {}
    for sub in itertools.combinations(range(g.arity), k):
        ends = [x for i in sub for x in g.edges[i]]
        if len(set(ends)) == 2 * k:
            terms[_mono(g.arity, sub)] = 0
    return TropPoly(mode, g.arity, terms)


def inner_product_poly(k: int, mode: Mode = Mode.RPLUS) -> TropPoly:
    """⊕_i x_i ⊗ y_i with x_i at index i and y_i at index k + i (0-based)."""
    if k < 1:
        raise ValueError("k must be positive")
    return TropPoly(mode, 2 * k, {_mono(2 * k, [i, k + i]): 0 for i in range(k)})


def parse_graph(text: str) -> CostGraph:
    """Edge-list text: a ``graph n=<n> directed=<0|1> [s=<v>] [t=<v>]`` header, then ``u v`` lines."""
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if parts[0] != "graph":
                raise ValueError(f"line {lineno}: expected a 'graph' header")
            header = {}
            for p in parts[1:]:
                k, eq, v = p.partition("=")
                if not eq or k not in ("n", "directed", "s", "t"):
                    raise ValueError(f"line {lineno}: bad header field {p!r}")
                try:
                    header[k] = int(v)
                except ValueError:
                    raise ValueError(f"line {lineno}: {k} must be an integer") from None
            if "n" not in header:
                raise ValueError(f"line {lineno}: header needs n=")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: vertices must be integers") from None
    if header is None:
        raise ValueError("line 1: missing 'graph' header")
    return CostGraph(header["n"], bool(header.get("directed", 0)), tuple(edges), header.get("s"), header.get("t"))


def format_graph(g: CostGraph) -> str:
    head = f"graph n={g.n} directed={int(g.directed)}"
    if g.s is not None:
        head += f" s={g.s}"
    if g.t is not None:
        head += f" t={g.t}"
    return "\n".join([head] + [f"{u} {v}" for u, v in g.edges]) + "\n"


__all__ = [
    "CostGraph",
    "complete_graph",
    "complete_bipartite",
    "perm_poly",
    "hc_poly",
    "cyclic_permutations",
    "shortest_path_poly",
    "simple_paths",
    "k_matching_poly",
    "inner_product_poly",
    "parse_graph",
    "format_graph",
]
