"""Width-2 constructions: univariate ladders, bivariate bridges and the Q format."""

from __future__ import annotations

from typing import Sequence

from ..models import Abp, Const, Edge, Var, abp_concat
from ..poly import TropPoly, canonicalize
from ..semiring import INF, Mode

# -- univariate ladder -----------------------------------------------------------


def univariate_to_width2(f: TropPoly) -> Abp:
    """Weakest width-2 ABP for a univariate polynomial (Horner ladder).

    Vertex 0 carries the running Horner value, vertex 1 the constant 0.  Each
    step multiplies by x and adds the next lower coefficient through the
    1 -> 0 edge.  The first step is folded into a single x edge when the top
    coefficient is 0 and the next one is absent; otherwise a separate first
    step pays the leading coefficient.
    """
    if f.arity != 1:
        raise ValueError("univariate_to_width2 needs arity 1")
    mode = f.mode
    if not f.terms:
        return Abp(mode, 1, [1, 1], [])
    g = canonicalize(f)
    coef = {e[0]: c for e, c in g.terms.items()}
    d = max(coef)
    x = Var(0)
    if d == 0:
        return Abp(mode, 1, [1, 1], [Edge(0, 0, 0, Const(coef[0]))])
    edges: list[Edge] = []
    fold = coef[d] == 0 and (d - 1) not in coef
    if fold:
        # layer 1 already holds x (top) and 0 (bottom); remaining steps t = 2..d.
        layers = [1] + [2] * (d - 1) + [1]
        edges.append(Edge(0, 0, 0, x))
        if d > 1:
            edges.append(Edge(0, 0, 1, Const(0)))
        first = 2
        base = 1
    else:
        layers = [1] + [2] * d + [1]
        edges.append(Edge(0, 0, 0, Const(coef[d])))
        edges.append(Edge(0, 0, 1, Const(0)))
        first = 1
        base = 1
    # Step t (t = first..d) goes from vertex layer k = t - first + base to k + 1.
    for t in range(first, d + 1):
        k = t - first + base
        last = t == d
        edges.append(Edge(k, 0, 0, x))
        c = coef.get(d - t)
        if c is not None:
            edges.append(Edge(k, 1, 0, Const(c)))
        if not last:
            edges.append(Edge(k, 1, 1, Const(0)))
    return Abp(mode, 1, layers, edges)


# -- bivariate bridges -------------------------------------------------------------


def pareto_monomials(f: TropPoly) -> list[tuple[int, int]]:
    """Exponents left after the absorptions used for ∞-0 bivariate polynomials.

    Sorted by strictly decreasing x-power; y-powers come out strictly
    increasing.  A monomial is dropped when another one has both powers no
    larger.
    """
    out: list[tuple[int, int]] = []
    best = None
    for a, b in sorted(f.terms):
        if best is None or b < best:
            out.append((a, b))
            best = b
    out.reverse()
    return out


def bivariate_to_width2(f: TropPoly, pad_width: bool = True) -> Abp:
    """Weakest width-2 ABP for an ∞-0 bivariate polynomial over R⁺.

    The lower row collects y-edges, the upper row x-edges, and one bridge per
    surviving monomial moves from the lower to the upper row.  Between
    consecutive bridges both rows are padded with 0-edges to a common length.
    """
    if f.mode is not Mode.RPLUS:
        raise ValueError("bivariate_to_width2 works over R⁺ only")
    if f.arity != 2:
        raise ValueError("bivariate_to_width2 needs arity 2")
    if any(c != 0 for c in f.terms.values()):
        raise ValueError("every coefficient must be 0")
    mode = f.mode
    if not f.terms:
        return Abp(mode, 2, [1, 2, 1] if pad_width else [1, 1], [])
    mons = pareto_monomials(f)
    x, y = Var(0), Var(1)
    zero = Const(0)
    if len(mons) == 1:
        a, b = mons[0]
        labels = [y] * b + [x] * a or [zero]
        n = len(labels)
        edges = [Edge(k, 0, 0, lab) for k, lab in enumerate(labels)]
        layers = [1] * (n + 1)
        if pad_width:
            # An isolated vertex keeps the declared width at 2.
            if n >= 2:
                layers[1] = 2
            else:
                layers = [1, 2, 1]
                edges = [Edge(0, 0, 0, labels[0]), Edge(1, 0, 0, zero)]
        return Abp(mode, 2, layers, edges)
    # Bridge i leaves the lower row at edge layer t_i and lands on the upper
    # row one layer later.  The lower row has collected low_i y's by then,
    # the upper row still has to collect a_i x's.
    low = [b - 1 if b >= 1 else 0 for _, b in mons]
    bridge = [y if b >= 1 else zero for _, b in mons]
    t = [low[0]]
    for i in range(len(mons) - 1):
        t.append(t[-1] + max(low[i + 1] - low[i], mons[i][0] - mons[i + 1][0], 1))
    T = t[-1] + 1 + mons[-1][0]

    def has_low(k: int) -> bool:
        return k <= t[-1]

    def has_top(k: int) -> bool:
        return t[0] + 1 <= k <= T

    layers = [int(has_low(k)) + int(has_top(k)) for k in range(T + 1)]

    def vid(k: int, row: str) -> int:
        # Upper row first so the sink is vertex 0; lone vertices are vertex 0.
        if row == "top" or not has_top(k):
            return 0
        return 1

    edges: list[Edge] = []
    # Lower row: y-edges are spent first within each segment.
    low_labels = [y] * t[0]
    for i in range(len(t) - 1):
        need = low[i + 1] - low[i]
        low_labels += [y] * need + [zero] * (t[i + 1] - t[i] - need)
    for k, lab in enumerate(low_labels):
        edges.append(Edge(k, vid(k, "low"), vid(k + 1, "low"), lab))
    # Upper row segments between bridge landings, then the x^{a_l} suffix.
    for i in range(len(mons)):
        lo = t[i] + 1
        hi = t[i + 1] + 1 if i + 1 < len(mons) else T
        need = mons[i][0] - (mons[i + 1][0] if i + 1 < len(mons) else 0)
        for k in range(lo, hi):
            lab = x if need > 0 else zero
            need -= 1
            edges.append(Edge(k, vid(k, "top"), vid(k + 1, "top"), lab))
    for i, ti in enumerate(t):
        edges.append(Edge(ti, vid(ti, "low"), vid(ti + 1, "top"), bridge[i]))
    return Abp(mode, 2, layers, edges)


# -- Q format ------------------------------------------------------------------------


def q_atom(mode: Mode, arity: int, label) -> Abp:
    """One-matrix ABP for Q(label) = ((label, 0), (0, ∞))."""
    edges = [Edge(0, 0, 1, Const(0)), Edge(0, 1, 0, Const(0))]
    if not (isinstance(label, Const) and label.value is INF):
        edges.insert(0, Edge(0, 0, 0, label))
    return Abp(mode, arity, [2, 2], edges)


def q_infinity(mode: Mode, arity: int) -> Abp:
    return q_atom(mode, arity, Const(INF))


def q_wrap(a: Abp) -> Abp:
    """Q-format ABP for the polynomial of a one-edge ABP."""
    if a.length != 1 or a.layers != (1, 1) or len(a.edges) > 1:
        raise ValueError("q_wrap takes a single-edge ABP")
    if a.kind != "weakest":
        raise ValueError("q_wrap needs a weakest label")
    label = a.edges[0].label if a.edges else Const(INF)
    return q_atom(a.mode, a.arity, label)


def _check_q(a: Abp) -> None:
    if a.width != 2 or a.layers[0] != 2 or a.layers[-1] != 2:
        raise ValueError("Q-format ABPs have width 2 with two-vertex end layers")


def q_add(a: Abp, b: Abp) -> Abp:
    """Q(f) ⊗ Q(∞) ⊗ Q(g) = Q(f ⊕ g)."""
    _check_q(a)
    _check_q(b)
    return abp_concat(abp_concat(a, q_infinity(a.mode, a.arity)), b)


def q_sum_atoms(mode: Mode, arity: int, labels: Sequence) -> Abp:
    """Q-format ABP for the sum of the given weakest labels."""
    if not labels:
        return q_infinity(mode, arity)
    out = q_atom(mode, arity, labels[0])
    for lab in labels[1:]:
        out = q_add(out, q_atom(mode, arity, lab))
    return out


def q_read(a: Abp) -> Abp:
    """Standard ABP reading entry (0, 0) of a Q-format ABP."""
    _check_q(a)
    last = a.length - 1
    edges = [e for e in a.edges if not (e.layer == 0 and e.src != 0) and not (e.layer == last and e.dst != 0)]
    layers = list(a.layers)
    layers[0] = 1
    layers[-1] = 1
    return Abp(a.mode, a.arity, layers, edges, a.kind)


def bridge_size_bound(f: TropPoly) -> int:
    """Size bound 8(degree + 1) checked for the bridge construction."""
    return 8 * (max((sum(e) for e in f.terms), default=0) + 1)


__all__ = [
    "univariate_to_width2",
    "bivariate_to_width2",
    "pareto_monomials",
    "q_atom",
    "q_infinity",
    "q_wrap",
    "q_add",
    "q_sum_atoms",
    "q_read",
    "bridge_size_bound",
]
