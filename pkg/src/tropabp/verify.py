"""Equivalence oracle, counterexample search and the width-2 survey."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .models import Abp, Const, Edge, Lin, Leaf, Var, expand, model_eval
from .poly import TropPoly, distinguishing_point, func_equal, poly_eval
from .semiring import INF, Mode, TropValue, is_finite


def models_equal(a, b, max_terms: int | None = 100_000) -> bool:
    """Function equality of two models or polynomials via their expansions."""
    fa = a if isinstance(a, TropPoly) else expand(a, max_terms)
    fb = b if isinstance(b, TropPoly) else expand(b, max_terms)
    return func_equal(fa, fb)


# -- counterexamples ----------------------------------------------------------------


def _constants(m) -> list[TropValue]:
    if isinstance(m, TropPoly):
        return list(m.terms.values())
    if isinstance(m, Abp):
        out = []
        for e in m.edges:
            if isinstance(e.label, Const):
                out.append(e.label.value)
            elif isinstance(e.label, Lin):
                out += list(e.label.poly.terms.values())
        return out
    return [nd.label.value for nd in m.nodes if isinstance(nd, Leaf) and isinstance(nd.label, Const)]


def _value(m, pt) -> TropValue:
    return poly_eval(m, pt) if isinstance(m, TropPoly) else model_eval(m, pt)


@dataclass(frozen=True)
class Witness:
    point: tuple
    model_value: TropValue
    target_value: TropValue
    strategy: str


def structured_points(arity: int, big: TropValue, limit: int = 1 << 14):
    """Every {0, big} pattern over the variables (random subsets past ``limit``)."""
    if 2**arity <= limit:
        for bits in itertools.product((0, 1), repeat=arity):
            yield tuple(big if b else 0 for b in bits)
        return
    rng = random.Random(0)
    for _ in range(limit):
        yield tuple(big if rng.random() < 0.5 else 0 for _ in range(arity))


def counterexample_search(
    m,
    target: TropPoly,
    strategy: str = "all",
    rng: random.Random | None = None,
    n_random: int = 200,
    max_terms: int | None = 100_000,
) -> Witness | None:
    """A point where ``m`` and ``target`` differ.

    Strategies: ``structured`` tries {0, c+1} patterns with c the largest
    absolute constant (and the sum of absolute constants); ``random`` tries
    integer points; ``canonical`` compares canonical forms and is complete.
    ``all`` runs them in that order.
    """
    arity = target.arity
    if m.arity != arity:
        raise ValueError("model and target must have the same arity")
    rng = rng or random.Random(0)
    steps = ("structured", "random", "canonical") if strategy == "all" else (strategy,)
    for st in steps:
        if st == "structured":
            consts = [abs(c) for c in _constants(m) + list(target.terms.values()) if is_finite(c)]
            bigs = sorted({max(consts, default=0) + 1, sum(consts) + 1})
            for big in bigs:
                for pt in structured_points(arity, big):
                    a, b = _value(m, pt), poly_eval(target, pt)
                    if a != b:
                        return Witness(pt, a, b, st)
        elif st == "random":
            lo = 0 if target.mode is Mode.RPLUS else -10
            for _ in range(n_random):
                pt = tuple(rng.randint(lo, 10) for _ in range(arity))
                a, b = _value(m, pt), poly_eval(target, pt)
                if a != b:
                    return Witness(pt, a, b, st)
        elif st == "canonical":
            f = m if isinstance(m, TropPoly) else expand(m, max_terms)
            pt = distinguishing_point(f, target)
            if pt is None:
                continue
            pt = _readable(f, target, pt)
            return Witness(pt, poly_eval(f, pt), poly_eval(target, pt), st)
        else:
            raise ValueError(f"unknown strategy {st!r}")
    return None


def _readable(f: TropPoly, g: TropPoly, pt: tuple) -> tuple:
    """Integer point when rounding keeps the two functions apart."""
    if all(isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1) for v in pt):
        return tuple(int(v) for v in pt)
    for scale in (1, 2, 4, 8):
        cand = tuple(round(v * scale) / scale for v in pt)
        cand = tuple(Fraction(v).limit_denominator(scale) for v in cand)
        cand = tuple(int(v) if v.denominator == 1 else v for v in cand)
        if poly_eval(f, cand) != poly_eval(g, cand):
            return cand
    return pt


# -- the width-2 survey --------------------------------------------------------------

ABSENT = -1


def default_alphabet(k: int = 3) -> list:
    """x_1..x_k, y_1..y_k and the constant 0, as weakest labels over 2k variables."""
    return [Var(i) for i in range(2 * k)] + [Const(0)]


@dataclass
class SurveyReport:
    mode: Mode
    target: TropPoly
    samples: int
    seed: int
    max_layers: int
    exhaustive: bool
    numeric_candidates: int = 0
    matches: list = field(default_factory=list)
    near_misses: list = field(default_factory=list)

    @property
    def match_count(self) -> int:
        return len(self.matches)

    def to_kv(self) -> str:
        from .poly import format_poly

        lines = [
            f"mode={self.mode.value}",
            f"target={format_poly(self.target)}",
            f"seed={self.seed}",
            f"max_layers={self.max_layers}",
            f"exhaustive={int(self.exhaustive)}",
            f"samples={self.samples}",
            f"numeric_candidates={self.numeric_candidates}",
            f"matches={self.match_count}",
            f"near_misses={len(self.near_misses)}",
        ]
        return "\n".join(lines)


def _test_points(rng: np.random.Generator, mode: Mode, arity: int, k: int) -> np.ndarray:
    lo = 0 if mode is Mode.RPLUS else -20
    pts = rng.integers(lo, 21, size=(k, arity)).astype(float)
    return pts


def _label_values(alphabet: Sequence, pts: np.ndarray) -> np.ndarray:
    """Rows: label value at each test point; the last row is the absent edge."""
    rows = []
    for lab in alphabet:
        if isinstance(lab, Var):
            rows.append(pts[:, lab.index])
        else:
            v = lab.value
            rows.append(np.full(len(pts), np.inf if v is INF else float(v)))
    rows.append(np.full(len(pts), np.inf))
    return np.array(rows)


def _sample_batch(rng: np.random.Generator, n: int, max_edge_layers: int, n_labels: int, p_absent: float, p_wide: float):
    """Random width-2 shapes and label codes, padded to ``max_edge_layers``."""
    L = rng.integers(1, max_edge_layers + 1, size=n)
    sizes = np.where(rng.random((n, max_edge_layers + 1)) < p_wide, 2, 1)
    idx = np.arange(max_edge_layers + 1)[None, :]
    sizes[:, 0] = 1
    sizes = np.where(idx >= L[:, None], 1, sizes)
    codes = rng.integers(0, n_labels, size=(n, max_edge_layers, 2, 2))
    codes = np.where(rng.random(codes.shape) < p_absent, ABSENT, codes)
    return L, sizes, _mask_codes(L, sizes, codes, n_labels)


def _mask_codes(L, sizes, codes, n_labels):
    n, m = codes.shape[:2]
    src_ok = sizes[:, :m, None] > np.arange(2)[None, None, :]  # [n, m, 2]
    dst_ok = sizes[:, 1:, None] > np.arange(2)[None, None, :]
    ok = src_ok[:, :, :, None] & dst_ok[:, :, None, :]
    codes = np.where(ok, codes, ABSENT)
    # Layers past the sink repeat the sink through a 0 edge.
    pad = np.arange(m)[None, :] >= L[:, None]
    ident = np.full((2, 2), ABSENT)
    ident[0, 0] = n_labels - 1
    codes = np.where(pad[:, :, None, None], ident[None, None], codes)
    return codes


def _batch_values(codes: np.ndarray, lv: np.ndarray) -> np.ndarray:
    n, m = codes.shape[:2]
    K = lv.shape[1]
    table = np.where(codes == ABSENT, lv.shape[0] - 1, codes)
    cur = np.full((n, 2, K), np.inf)
    cur[:, 0] = 0.0
    for layer in range(m):
        E = lv[table[:, layer]]  # [n, 2, 2, K]
        cur = np.min(cur[:, :, None, :] + E, axis=1)
    return cur[:, 0]


def _decode(mode: Mode, arity: int, alphabet: Sequence, L: int, sizes, codes) -> Abp:
    layers = [int(s) for s in sizes[: L + 1]]
    edges = []
    for k in range(L):
        for i in range(2):
            for j in range(2):
                c = int(codes[k, i, j])
                if c != ABSENT:
                    edges.append(Edge(k, i, j, alphabet[c]))
    return Abp(mode, arity, layers, edges)


def _zero_index(alphabet: Sequence) -> int:
    for i, lab in enumerate(alphabet):
        if isinstance(lab, Const) and lab.value == 0:
            return i
    raise ValueError("the alphabet needs the constant 0 for layer padding")


def width2_survey(
    target: TropPoly,
    max_layers: int = 6,
    alphabet: Sequence | None = None,
    samples: int = 100_000,
    seed: int = 0,
    exhaustive: bool = False,
    n_points: int = 32,
    shard: int = 10_000,
    p_absent: float = 0.25,
    p_wide: float = 0.75,
    keep_near: int = 10,
) -> SurveyReport:
    """Search weakest width-2 ABPs with at most ``max_layers`` vertex layers for ``target``.

    Every ABP is first evaluated numerically at shared test points; only ABPs
    that agree everywhere are expanded and compared exactly.  Near misses are
    the ABPs agreeing at the most test points without being exact matches.
    """
    mode = target.mode
    arity = target.arity
    alphabet = list(alphabet) if alphabet is not None else default_alphabet(arity // 2)
    zero = _zero_index(alphabet)
    # Put the constant 0 last so the padding code is n_labels - 1.
    order = [i for i in range(len(alphabet)) if i != zero] + [zero]
    alphabet = [alphabet[i] for i in order]
    n_labels = len(alphabet)
    m = max_layers - 1
    if m < 1:
        raise ValueError("max_layers must be at least 2")
    base = np.random.default_rng(np.random.SeedSequence(seed))
    pts = _test_points(base, mode, arity, n_points)
    lv = _label_values(alphabet, pts)
    tvals = [poly_eval(target, [int(x) for x in p]) for p in pts]
    tv = np.array([np.inf if v is INF else float(v) for v in tvals])
    rep = SurveyReport(mode, target, 0, seed, max_layers, exhaustive)
    near: list[tuple[int, Abp]] = []

    def consume(L, sizes, codes) -> None:
        vals = _batch_values(codes, lv)
        score = (vals == tv[None, :]).sum(axis=1)
        for r in np.nonzero(score == n_points)[0]:
            rep.numeric_candidates += 1
            a = _decode(mode, arity, alphabet, int(L[r]), sizes[r], codes[r])
            if func_equal(expand(a), target):
                rep.matches.append(a)
            else:
                near.append((n_points, a))
        if keep_near:
            for r in np.argsort(-score, kind="stable")[:keep_near]:
                if score[r] < n_points:
                    near.append((int(score[r]), _decode(mode, arity, alphabet, int(L[r]), sizes[r], codes[r])))
        near.sort(key=lambda t: -t[0])
        del near[keep_near:]
        rep.samples += len(L)

    if exhaustive:
        if max_layers > 3:
            raise ValueError("exhaustive mode covers at most 3 vertex layers")
        for L, sizes, codes in _exhaustive(m, n_labels):
            consume(L, sizes, codes)
    else:
        seqs = np.random.SeedSequence(seed).spawn((samples + shard - 1) // shard)
        left = samples
        for ss in seqs:
            n = min(shard, left)
            left -= n
            L, sizes, codes = _sample_batch(np.random.default_rng(ss), n, m, n_labels, p_absent, p_wide)
            consume(L, sizes, codes)
    rep.near_misses = [a for _, a in near]
    return rep


def _exhaustive(m: int, n_labels: int):
    """All width-2 ABPs with at most m ≤ 2 edge layers, in batches per shape."""
    choices = list(range(n_labels)) + [ABSENT]
    shapes = [[1, 1]]
    if m >= 2:
        shapes += [[1, 1, 1], [1, 2, 1]]
    for shape in shapes:
        L = len(shape) - 1
        slots = [(k, i, j) for k in range(L) for i in range(shape[k]) for j in range(shape[k + 1])]
        combos = np.array(list(itertools.product(choices, repeat=len(slots))), dtype=int)
        n = len(combos)
        codes = np.full((n, m, 2, 2), ABSENT)
        for col, (k, i, j) in enumerate(slots):
            codes[:, k, i, j] = combos[:, col]
        sizes = np.ones((n, m + 1), dtype=int)
        sizes[:, : L + 1] = shape
        Ls = np.full(n, L)
        codes = _mask_codes(Ls, sizes, codes, n_labels)
        yield Ls, sizes, codes


__all__ = [
    "models_equal",
    "Witness",
    "counterexample_search",
    "structured_points",
    "SurveyReport",
    "width2_survey",
    "default_alphabet",
]
