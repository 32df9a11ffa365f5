"""Tropical polynomials with exact absorption-based canonical forms.

A :class:`TropPoly` maps exponent tuples to finite coefficients.  Two
polynomials compute the same function exactly when their canonical forms
coincide, because the set of non-dominated monomials is unique.

Canonicalization decides domination with the exact LP in :mod:`tropabp.lp`.
Before paying for LPs it certifies as many survivors as it can by finding,
for each, an integer point where that monomial is the strict unique minimum;
such a monomial cannot be dominated.  The sampling only chooses which LPs to
run, never their outcome, so the result is deterministic.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hull import DROP, KEEP, UNDECIDED, hull_classify
from .lp import domination_lp, fast_domination
from .semiring import (
    INF,
    Mode,
    TropValue,
    check_value,
    format_value,
    normalize,
    parse_value,
)

Exponent = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """Raised when an expansion or pass exceeds its configured budget."""


class TropPoly:
    """Immutable tropical polynomial over a fixed number of variables."""

    __slots__ = ("mode", "arity", "terms", "_canonical", "_hash")

    def __init__(
        self,
        mode: Mode,
        arity: int,
        terms: Mapping[Exponent, TropValue] | Iterable[tuple[Exponent, TropValue]] = (),
        *,
        canonical: bool = False,
        _trusted: bool = False,
    ):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        self.mode = mode
        self.arity = arity
        if _trusted:
            self.terms = dict(terms)
        else:
            items = terms.items() if isinstance(terms, Mapping) else terms
            clean: dict[Exponent, TropValue] = {}
            for exp, coef in items:
                exp = tuple(int(e) for e in exp)
                if len(exp) != arity:
                    raise ValueError(f"exponent {exp} does not match arity {arity}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                coef = normalize(coef)
                if coef is INF:
                    continue
                check_value(coef, mode)
                old = clean.get(exp)
                if old is None or coef < old:
                    clean[exp] = coef
            self.terms = clean
        self._canonical = canonical or len(self.terms) <= 1
        self._hash = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def empty(cls, mode: Mode, arity: int) -> "TropPoly":
        return cls(mode, arity, {}, _trusted=True)

    @classmethod
    def constant(cls, mode: Mode, arity: int, c: TropValue) -> "TropPoly":
        return cls(mode, arity, {(0,) * arity: c})

    @classmethod
    def variable(cls, mode: Mode, arity: int, i: int, coef: TropValue = 0) -> "TropPoly":
        if not 0 <= i < arity:
            raise ValueError(f"variable index {i} out of range for arity {arity}")
        exp = [0] * arity
        exp[i] = 1
        return cls(mode, arity, {tuple(exp): coef})

    @classmethod
    def monomial(cls, mode: Mode, exp: Sequence[int], coef: TropValue = 0) -> "TropPoly":
        return cls(mode, len(exp), {tuple(exp): coef})

    # -- basic protocol -------------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropPoly):
            return NotImplemented
        return self.mode is other.mode and self.arity == other.arity and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.mode, self.arity, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"TropPoly({format_poly(self)!r})"

    @property
    def is_canonical(self) -> bool:
        return self._canonical

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[Exponent, TropValue]]:
        return sorted(self.terms.items())

    def __add__(self, other: "TropPoly") -> "TropPoly":
        return poly_add(self, other)

    def __mul__(self, other: "TropPoly") -> "TropPoly":
        return poly_mul(self, other)

    def __call__(self, *point) -> TropValue:
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return poly_eval(self, point)


def _same_space(f: TropPoly, g: TropPoly) -> None:
    if f.mode is not g.mode:
        raise ValueError(f"mode mismatch: {f.mode} vs {g.mode}")
    if f.arity != g.arity:
        raise ValueError(f"arity mismatch: {f.arity} vs {g.arity}")


def check_point(point: Sequence, arity: int, mode: Mode) -> tuple[TropValue, ...]:
    if len(point) != arity:
        raise ValueError(f"point has {len(point)} entries, expected {arity}")
    pt = tuple(normalize(v) for v in point)
    for v in pt:
        check_value(v, mode)
    return pt


def poly_eval(f: TropPoly, point: Sequence) -> TropValue:
    pt = check_point(point, f.arity, f.mode)
    best: TropValue = INF
    for exp, coef in f.terms.items():
        val = coef
        for e, x in zip(exp, pt):
            if e:
                if x is INF:
                    val = INF
                    break
                val = val + e * x
        if val is not INF and (best is INF or val < best):
            best = val
    return best


def poly_add(f: TropPoly, g: TropPoly) -> TropPoly:
    _same_space(f, g)
    if not g.terms:
        return canonicalize(f)
    if not f.terms:
        return canonicalize(g)
    out = dict(f.terms)
    for exp, coef in g.terms.items():
        old = out.get(exp)
        if old is None or coef < old:
            out[exp] = coef
    return canonicalize(TropPoly(f.mode, f.arity, out, _trusted=True))


def poly_sum(polys: Sequence[TropPoly], mode: Mode, arity: int, max_terms: int | None = None) -> TropPoly:
    polys = [p for p in polys if p.terms]
    if not polys:
        return TropPoly.empty(mode, arity)
    base = max(polys, key=len)
    if base._canonical and all(
        p is base or all(base.terms.get(e, INF) <= c for e, c in p.terms.items()) for p in polys
    ):
        # Every other summand is already covered term by term.
        return base
    out: dict[Exponent, TropValue] = {}
    for p in polys:
        for exp, coef in p.terms.items():
            old = out.get(exp)
            if old is None or coef < old:
                out[exp] = coef
    if max_terms is not None and len(out) > max_terms:
        raise BudgetExceeded(f"polynomial with {len(out)} terms exceeds the term budget {max_terms}")
    return canonicalize(TropPoly(mode, arity, out, _trusted=True))


def poly_mul(f: TropPoly, g: TropPoly, max_terms: int | None = None) -> TropPoly:
    _same_space(f, g)
    if not f.terms or not g.terms:
        return TropPoly.empty(f.mode, f.arity)
    if len(g.terms) == 1 and f._canonical:
        return _shift(f, *next(iter(g.terms.items())))
    if len(f.terms) == 1 and g._canonical:
        return _shift(g, *next(iter(f.terms.items())))
    if max_terms is not None and len(f.terms) * len(g.terms) > max_terms:
        raise BudgetExceeded(
            f"product of {len(f.terms)} and {len(g.terms)} terms exceeds the term budget {max_terms}"
        )
    out: dict[Exponent, TropValue] = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            exp = tuple(a + b for a, b in zip(e1, e2))
            coef = c1 + c2
            old = out.get(exp)
            if old is None or coef < old:
                out[exp] = coef
    return canonicalize(TropPoly(f.mode, f.arity, out, _trusted=True))


def _shift(f: TropPoly, exp: Exponent, coef: TropValue) -> TropPoly:
    # Translating every monomial by the same vector preserves domination,
    # so a canonical input stays canonical.
    out = {tuple(a + b for a, b in zip(e, exp)): c + coef for e, c in f.terms.items()}
    return TropPoly(f.mode, f.arity, out, canonical=f._canonical, _trusted=True)


def poly_pow(f: TropPoly, ell: int) -> TropPoly:
    if ell < 0:
        raise ValueError("power must be nonnegative")
    result = TropPoly.constant(f.mode, f.arity, 0)
    base = canonicalize(f)
    while ell:
        if ell & 1:
            result = poly_mul(result, base)
        ell >>= 1
        if ell:
            base = poly_mul(base, base)
    return result


# -- domination ---------------------------------------------------------------

def dominates(candidate: tuple[Exponent, TropValue], others: Sequence[tuple[Exponent, TropValue]], mode: Mode) -> bool:
    """True iff ``candidate`` is >= min(others) at every admissible point."""
    exp, coef = candidate
    for e, _ in others:
        if len(e) != len(exp):
            raise ValueError("arity mismatch in domination test")
    coef = normalize(coef)
    if coef is INF:
        return True
    finite = [(e, normalize(c)) for e, c in others if normalize(c) is not INF]
    return fast_domination(exp, coef, finite, mode is Mode.RPLUS)


def separating_point(
    candidate: tuple[Exponent, TropValue], others: Sequence[tuple[Exponent, TropValue]], mode: Mode
) -> tuple[Fraction, ...] | None:
    """An admissible point where ``candidate`` is strictly below every monomial of ``others``.

    Returns None when the candidate is dominated (no such point exists).
    """
    exp, coef = candidate
    finite = [(e, c) for e, c in others if c is not INF]
    ok, witness = domination_lp(exp, coef, finite, mode is Mode.RPLUS)
    if ok:
        return None
    return witness


def _int_scale(coefs: Sequence[TropValue]) -> tuple[int, list[int]]:
    den = 1
    for c in coefs:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    return den, [int(c * den) for c in coefs]


_INT64_SAFE = 1 << 61


def _certify_by_sampling(exps: list[Exponent], coefs: list[TropValue], mode: Mode, alive: list[bool]) -> list[bool]:
    """Mark monomials that are the strict unique minimizer at some sampled point."""
    t = len(exps)
    n = len(exps[0])
    certified = [False] * t
    if n == 0:
        return certified
    idx = [i for i in range(t) if alive[i]]
    if len(idx) < 2:
        for i in idx:
            certified[i] = True
        return certified
    _, cint = _int_scale([coefs[i] for i in idx])
    E = np.array([exps[i] for i in idx], dtype=np.int64)
    spread = max(cint) - min(cint)
    maxdeg = int(E.sum(axis=1).max()) or 1
    cmax = max(abs(c) for c in cint)
    rng = np.random.default_rng(len(idx) * 7919 + n)
    base = max(1, spread // maxdeg + 1)

    def mark(X: np.ndarray) -> None:
        mag = int(np.abs(X).max()) if X.size else 0
        if cmax + maxdeg * mag >= _INT64_SAFE:
            return
        C = np.array(cint, dtype=np.int64)
        vals = C[:, None] + E @ X
        mins = vals.min(axis=0)
        hits = vals == mins[None, :]
        unique = hits.sum(axis=0) == 1
        winners = hits[:, unique].argmax(axis=0)
        for w in np.unique(winners):
            certified[idx[int(w)]] = True

    k = 160
    for scale in (1, base, 8 * base, 64 * base):
        if mode is Mode.R:
            X = rng.integers(-4 * scale, 4 * scale + 1, size=(n, k))
        else:
            X = rng.integers(0, 4 * scale + 1, size=(n, k))
            X *= rng.integers(0, 2, size=(n, k))
        mark(X)
    if mode is Mode.R:
        # Push outward along each monomial's offset from the centroid.
        D = E * len(idx) - E.sum(axis=0)[None, :]
        dmax = int(np.abs(D).max()) or 1
        factor = spread // 1 + 1
        if factor * dmax * maxdeg < _INT64_SAFE // 4:
            mark(-(D.T * factor))
    else:
        # Heavy weight on coordinates where the monomial is small.
        W = (E.max(axis=0)[None, :] - E) + 1
        factor = spread + 1
        Wp = W ** 2
        if factor * int(Wp.max()) * maxdeg < _INT64_SAFE // 4:
            mark((Wp * factor).T)
    mark(np.zeros((n, 1), dtype=np.int64))
    # Large supports need more points; keep sampling while it still pays off.
    scales = (1, base, 8 * base, 64 * base)
    for _ in range(6):
        before = sum(certified[i] for i in idx)
        if before == len(idx):
            break
        for _ in range(max(1, len(idx) // 256)):
            scale = scales[int(rng.integers(len(scales)))]
            if mode is Mode.R:
                X = rng.integers(-4 * scale, 4 * scale + 1, size=(n, 1024))
            else:
                X = rng.integers(0, 4 * scale + 1, size=(n, 1024))
                X *= rng.integers(0, 2, size=(n, 1024))
            mark(X)
        if sum(certified[i] for i in idx) - before < max(1, len(idx) // 100):
            break
    return certified


def canonicalize(f: TropPoly) -> TropPoly:
    """Remove every monomial dominated by the others."""
    if f._canonical:
        return f
    items = sorted(f.terms.items())
    t = len(items)
    exps = [e for e, _ in items]
    coefs = [c for _, c in items]
    alive = [True] * t
    n = f.arity
    if n == 0:
        return TropPoly(f.mode, 0, dict(items[:1]), canonical=True, _trusted=True)

    if f.mode is Mode.RPLUS:
        # Pairwise componentwise domination is transitive, so one sweep suffices.
        _, cint = _int_scale(coefs)
        E = np.array(exps, dtype=np.int64)
        if max(abs(c) for c in cint) < _INT64_SAFE:
            C = np.array(cint, dtype=np.int64)
            for i in range(t):
                le = np.all(E <= E[i], axis=1) & (C <= C[i])
                le[i] = False
                if le.any():
                    alive[i] = False
        else:
            for i in range(t):
                for j in range(t):
                    if i != j and coefs[j] <= coefs[i] and all(a <= b for a, b in zip(exps[j], exps[i])):
                        alive[i] = False
                        break

    nonneg = f.mode is Mode.RPLUS
    status = hull_classify(exps, coefs, alive, nonneg) if t > 3 else [UNDECIDED] * t
    for i in range(t):
        if status[i] == DROP:
            alive[i] = False
    if any(alive[i] and status[i] == UNDECIDED for i in range(t)):
        certified = _certify_by_sampling(exps, coefs, f.mode, alive)
    else:
        certified = [False] * t
    for i in range(t):
        if status[i] == KEEP:
            certified[i] = True
    all_exps = np.array(exps, dtype=np.int64)
    for i in range(t):
        if not alive[i] or certified[i]:
            continue
        keep = [j for j in range(t) if j != i and alive[j]]
        rest = [(exps[j], coefs[j]) for j in keep]
        if fast_domination(exps[i], coefs[i], rest, nonneg, all_exps[keep]):
            alive[i] = False
        else:
            certified[i] = True
    out = {exps[i]: coefs[i] for i in range(t) if alive[i]}
    return TropPoly(f.mode, f.arity, out, canonical=True, _trusted=True)


def func_equal(f: TropPoly, g: TropPoly) -> bool:
    _same_space(f, g)
    return canonicalize(f).terms == canonicalize(g).terms


def distinguishing_point(f: TropPoly, g: TropPoly) -> tuple[Fraction, ...] | None:
    """A point where f and g differ, or None if they are the same function.

    Complete: if the canonical forms differ, some monomial of one side is not
    dominated by the other side, and its LP refutation is such a point.
    """
    _same_space(f, g)
    cf, cg = canonicalize(f), canonicalize(g)
    if cf.terms == cg.terms:
        return None
    for a, b in ((cf, cg), (cg, cf)):
        for exp, coef in sorted(a.terms.items()):
            if b.terms.get(exp) == coef:
                continue
            pt = separating_point((exp, coef), list(b.terms.items()), f.mode)
            if pt is not None:
                return pt
    raise AssertionError("canonical forms differ but no separating point was found")


# -- substitution -------------------------------------------------------------

def poly_substitute(f: TropPoly, mapping: Sequence[tuple[str, object]], arity: int) -> TropPoly:
    """Substitute each variable by ("var", j) or ("const", value) into a new space."""
    if len(mapping) != f.arity:
        raise ValueError("substitution map must cover every variable")
    out: dict[Exponent, TropValue] = {}
    for exp, coef in f.terms.items():
        new = [0] * arity
        val = coef
        for e, (kind, arg) in zip(exp, mapping):
            if not e:
                continue
            if kind == "var":
                new[arg] += e
            else:
                c = normalize(arg)
                if c is INF:
                    val = INF
                    break
                val = val + e * c
        if val is INF:
            continue
        key = tuple(new)
        old = out.get(key)
        if old is None or val < old:
            out[key] = val
    return canonicalize(TropPoly(f.mode, arity, out, _trusted=True))


# -- text format --------------------------------------------------------------

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def default_names(arity: int) -> list[str]:
    return [f"x{i}" for i in range(arity)]


def _check_names(names: Sequence[str]) -> None:
    for nm in names:
        if not _NAME.match(nm):
            raise ValueError(f"bad variable name {nm!r}")
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")


def format_terms(f: TropPoly, names: Sequence[str], sep: str = " ; ") -> str:
    if not f.terms:
        return "inf"
    parts = []
    for exp, coef in sorted(f.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
        factors = []
        for nm, e in zip(names, exp):
            if e == 1:
                factors.append(nm)
            elif e > 1:
                factors.append(f"{nm}^{e}")
        if coef != 0 or not factors:
            factors.insert(0, format_value(coef))
        parts.append("*".join(factors))
    return sep.join(parts)


def format_poly(f: TropPoly, names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else default_names(f.arity)
    if len(names) != f.arity:
        raise ValueError("name list does not match arity")
    return f"poly mode={f.mode} vars={','.join(names)} : {format_terms(f, names)}"


def parse_terms(body: str, names: Sequence[str], mode: Mode, sep: str = ";") -> TropPoly:
    index = {nm: i for i, nm in enumerate(names)}
    arity = len(names)
    terms: list[tuple[Exponent, TropValue]] = []
    for raw in body.split(sep):
        raw = raw.strip()
        if not raw:
            continue
        exp = [0] * arity
        coef: TropValue = 0
        for factor in raw.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in term {raw!r}")
            base, _, power = factor.partition("^")
            base = base.strip()
            if base in index:
                e = int(power) if power else 1
                if e < 0:
                    raise ValueError(f"negative exponent in {factor!r}")
                exp[index[base]] += e
            else:
                if power:
                    c = parse_value(base)
                    coef = INF if c is INF else (INF if coef is INF else coef + c * int(power))
                else:
                    c = parse_value(base)
                    coef = INF if (c is INF or coef is INF) else coef + c
        terms.append((tuple(exp), coef))
    return TropPoly(mode, arity, terms)


def parse_poly(text: str) -> tuple[TropPoly, list[str]]:
    """Parse ``poly mode=... vars=... : terms``; returns the polynomial and variable names."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    content = " ".join(ln for ln in lines if ln)
    if not content.startswith("poly"):
        raise ValueError("polynomial text must start with 'poly'")
    head, sep, body = content.partition(":")
    if not sep:
        raise ValueError("missing ':' between polynomial header and terms")
    fields = {}
    for tok in head.split()[1:]:
        key, eq, val = tok.partition("=")
        if not eq:
            raise ValueError(f"malformed header field {tok!r}")
        fields[key] = val
    if "mode" not in fields or "vars" not in fields:
        raise ValueError("polynomial header needs mode= and vars=")
    mode = Mode.parse(fields["mode"])
    names = [v for v in fields["vars"].split(",") if v]
    _check_names(names)
    return parse_terms(body, names, mode), names


def all_exponents(arity: int, max_degree: int) -> Iterable[Exponent]:
    for exp in itertools.product(range(max_degree + 1), repeat=arity):
        if sum(exp) <= max_degree:
            yield exp
