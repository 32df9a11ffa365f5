"""Linear factorization of univariate tropical polynomials over R.

The function x -> min_k (a_k + k x) is the lower envelope of the lines with
slopes k.  Its break points are the roots: between consecutive lower-hull
exponents k < k' the root is (a_k - a_k') / (k' - k) with multiplicity
k' - k, and f = a_top ⊗ x^low ⊗ ⊗_j (x ⊕ r_j)^mult_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..hull import lower_hull_1d
from ..models import CircuitBuilder, Formula
from ..poly import TropPoly, poly_mul, poly_pow
from ..semiring import Mode, TropValue, normalize


@dataclass(frozen=True)
class Factorization:
    """f = leading ⊗ x^low_power ⊗ ⊗ (x ⊕ root)^mult, roots in increasing order."""

    roots: tuple[tuple[TropValue, int], ...]
    leading: TropValue
    low_power: int

    @property
    def degree(self) -> int:
        return self.low_power + sum(m for _, m in self.roots)


def univariate_factor(f: TropPoly) -> Factorization:
    if f.arity != 1:
        raise ValueError("univariate_factor needs arity 1")
    if f.mode is not Mode.R:
        raise ValueError("univariate_factor works over R")
    if not f.terms:
        raise ValueError("the empty polynomial has no factorization")
    exps = sorted(e[0] for e in f.terms)
    coefs = [f.terms[(k,)] for k in exps]
    hull = [exps[i] for i in sorted(lower_hull_1d(exps, coefs), key=lambda i: exps[i])]
    a = {k: f.terms[(k,)] for k in hull}
    roots = []
    for k, k2 in zip(hull, hull[1:]):
        roots.append((normalize(Fraction(a[k] - a[k2]) / (k2 - k)), k2 - k))
    roots.sort(key=lambda rm: rm[0])
    return Factorization(tuple(roots), a[hull[-1]], hull[0])


def factor_product(fac: Factorization, mode: Mode = Mode.R) -> TropPoly:
    """Expanded product of the factorization."""
    out = TropPoly.monomial(mode, (fac.low_power,), fac.leading)
    for r, m in fac.roots:
        lin = TropPoly(mode, 1, {(1,): 0, (0,): r})
        out = poly_mul(out, poly_pow(lin, m))
    return out


def factor_formula(fac: Factorization, mode: Mode = Mode.R) -> Formula:
    """Formula leading ⊗ x^low ⊗ ⊗ (x ⊕ root)^mult with each power written out."""
    b = CircuitBuilder(mode, 1)
    parts = [b.const(fac.leading)] + [b.var(0) for _ in range(fac.low_power)]
    for r, m in fac.roots:
        for _ in range(m):
            parts.append(b.add(b.var(0), b.const(r)))
    return b.build_formula(b.prod(parts))


__all__ = ["Factorization", "univariate_factor", "factor_product", "factor_formula"]
