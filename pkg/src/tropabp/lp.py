"""Exact rational simplex used by the monomial domination test.

Everything runs over ``fractions.Fraction``; there is no tolerance anywhere.
The solver keeps the artificial columns of the initial basis in the tableau,
so the final tableau carries B^-1 and the dual vector comes for free.  The
dual is what turns a failed domination into a concrete separating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None
    x: tuple[Fraction, ...] | None
    # Dual multipliers.  For "optimal" they certify y.A_j <= c_j and y.b = value;
    # for "infeasible" they are a Farkas ray with y.A_j <= 0 and y.b > 0.
    y: tuple[Fraction, ...] | None


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], r: int, col: int) -> None:
    pr = rows[r]
    piv = pr[col]
    if piv != 1:
        inv = 1 / piv
        pr[:] = [v * inv if v else v for v in pr]
    nz = [j for j, v in enumerate(pr) if v]
    for k, row in enumerate(rows):
        if k == r:
            continue
        f = row[col]
        if f:
            for j in nz:
                row[j] -= f * pr[j]
    f = obj[col]
    if f:
        for j in nz:
            obj[j] -= f * pr[j]


def _run(rows, obj, basis, allowed) -> str:
    """Bland's-rule primal simplex on a tableau whose last column is the rhs."""
    rhs = len(obj) - 1
    while True:
        col = -1
        for j in range(rhs):
            if allowed[j] and obj[j] < 0:
                col = j
                break
        if col < 0:
            return "optimal"
        best = None
        best_r = -1
        for k, row in enumerate(rows):
            a = row[col]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best or (ratio == best and basis[k] < basis[best_r]):
                    best = ratio
                    best_r = k
        if best_r < 0:
            return "unbounded"
        _pivot(rows, obj, best_r, col)
        basis[best_r] = col


def solve_lp(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Minimize c.x subject to A x = b, x >= 0, with b >= 0 (exact)."""
    m = len(A)
    n = len(c)
    if any(bi < 0 for bi in b):
        raise ValueError("solve_lp expects a nonnegative right-hand side")
    width = n + m + 1
    rows: list[list[Fraction]] = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]] + [Fraction(0)] * m + [Fraction(b[i])]
        row[n + i] = Fraction(1)
        rows.append(row)
    basis = [n + i for i in range(m)]

    # Phase 1: minimize the sum of artificials.
    obj = [Fraction(0)] * width
    for j in range(n):
        obj[j] = -sum((rows[i][j] for i in range(m)), Fraction(0))
    obj[-1] = -sum((rows[i][-1] for i in range(m)), Fraction(0))
    allowed = [True] * (width - 1)
    _run(rows, obj, basis, allowed)
    phase1 = -obj[-1]
    if phase1 > 0:
        # y1 = c1_B B^-1; column n+i of the tableau is B^-1 e_i.
        costs1 = [Fraction(1) if basis[k] >= n else Fraction(0) for k in range(m)]
        y = tuple(sum((costs1[k] * rows[k][n + i] for k in range(m)), Fraction(0)) for i in range(m))
        return LPResult("infeasible", None, None, y)

    # Drive zero-level artificials out of the basis where possible.
    for k in range(m):
        if basis[k] >= n:
            for j in range(n):
                if rows[k][j] != 0:
                    _pivot(rows, obj, k, j)
                    basis[k] = j
                    break

    # Phase 2.
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    obj = cost + [Fraction(0)]
    for k in range(m):
        cb = cost[basis[k]]
        if cb:
            row = rows[k]
            for j in range(width):
                if row[j]:
                    obj[j] -= cb * row[j]
    allowed = [True] * n + [False] * m
    status = _run(rows, obj, basis, allowed)
    if status == "unbounded":
        return LPResult("unbounded", None, None, None)
    x = [Fraction(0)] * n
    for k in range(m):
        if basis[k] < n:
            x[basis[k]] = rows[k][-1]
    y = tuple(sum((cost[basis[k]] * rows[k][n + i] for k in range(m)), Fraction(0)) for i in range(m))
    return LPResult("optimal", -obj[-1], tuple(x), y)


def domination_lp(
    exp: Sequence[int],
    coef,
    others: Sequence[tuple[Sequence[int], object]],
    nonneg: bool,
) -> tuple[bool, tuple[Fraction, ...] | None]:
    """Decide whether monomial (exp, coef) lies above min(others) everywhere.

    ``nonneg`` selects the R+ domain, where the exponent combination may sit
    componentwise below ``exp``.  Returns ``(dominated, witness)``; when not
    dominated the witness is an admissible point at which the candidate is
    strictly below every other monomial.
    """
    n = len(exp)
    if not others:
        return False, tuple(Fraction(0) for _ in range(n))
    t = len(others)
    cols = t + (n if nonneg else 0)
    A = [[0] * cols for _ in range(n + 1)]
    for j, (e, _) in enumerate(others):
        for i in range(n):
            A[i][j] = e[i]
        A[n][j] = 1
    if nonneg:
        for i in range(n):
            A[i][t + i] = 1
    b = list(exp) + [1]
    c = [o[1] for o in others] + [0] * (cols - t)
    res = solve_lp(A, b, c)
    if res.status == "optimal" and res.value <= coef:
        return True, None
    assert res.y is not None
    ye = res.y[:n]
    if res.status == "optimal":
        point = tuple(-v for v in ye)
    else:
        delta = sum((ye[i] * exp[i] for i in range(n)), Fraction(0)) + res.y[n]
        gap = max([Fraction(coef) - Fraction(o[1]) for o in others] + [Fraction(0)])
        k = gap / delta + 1
        point = tuple(-k * v for v in ye)
    return False, point


def _solve_exact(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of M x = rhs if the columns are independent and it is consistent."""
    rows = [row[:] + [r] for row, r in zip(M, rhs)]
    k = len(M[0]) if M else 0
    piv_row = 0
    where = []
    for col in range(k):
        sel = next((r for r in range(piv_row, len(rows)) if rows[r][col] != 0), None)
        if sel is None:
            return None
        rows[piv_row], rows[sel] = rows[sel], rows[piv_row]
        pr = rows[piv_row]
        inv = 1 / pr[col]
        pr[:] = [v * inv for v in pr]
        for r in range(len(rows)):
            if r != piv_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], pr)]
        where.append(piv_row)
        piv_row += 1
    for r in range(piv_row, len(rows)):
        if rows[r][k] != 0:
            return None
    return [rows[where[c]][k] for c in range(k)]


def _check_support(exp, coef, sub, nonneg, res) -> bool:
    """Exactly confirm a float-proposed convex combination on its support."""
    if not sub:
        return False
    n = len(exp)
    cols = [[Fraction(e[i]) for i in range(n)] + [Fraction(1)] for e, _ in sub]
    if nonneg:
        # Rows with slack get an explicit slack column.
        slack = res.slack
        for i in range(n):
            if slack[i] > 1e-9:
                col = [Fraction(0)] * (n + 1)
                col[i] = Fraction(1)
                cols.append(col)
    M = [[cols[j][i] for j in range(len(cols))] for i in range(n + 1)]
    rhs = [Fraction(v) for v in exp] + [Fraction(1)]
    sol = _solve_exact(M, rhs)
    if sol is None:
        return domination_lp(exp, coef, sub, nonneg)[0]
    if any(v < 0 for v in sol):
        return domination_lp(exp, coef, sub, nonneg)[0]
    cost = sum((sol[j] * Fraction(sub[j][1]) for j in range(len(sub))), Fraction(0))
    return cost <= coef


LOCAL_TERMS = 48


def fast_domination(
    exp: Sequence[int],
    coef,
    others: Sequence[tuple[Sequence[int], object]],
    nonneg: bool,
    others_exps=None,
) -> bool:
    """Same answer as :func:`domination_lp`, using a float LP as a guide.

    The float solve only proposes a certificate.  A proposed convex
    combination is re-solved exactly on its support; a proposed separating
    point is checked exactly.  If neither check goes through, the exact
    simplex decides.  Large instances first try the nearest monomials only:
    domination by a subset is domination, and a separating point is
    rechecked against everything.  ``others_exps`` optionally gives the
    exponents of ``others`` as an integer array.
    """
    if not others:
        return False
    try:
        import numpy as np
    except ImportError:  # pragma: no cover
        return domination_lp(exp, coef, others, nonneg)[0]
    if len(others) > 2 * LOCAL_TERMS:
        if others_exps is None:
            others_exps = np.array([e for e, _ in others], dtype=np.int64)
        d = np.abs(others_exps - np.array(exp, dtype=np.int64)).sum(axis=1)
        near = [others[j] for j in np.argsort(d, kind="stable")[:LOCAL_TERMS]]
        verdict, point = _guided(exp, coef, near, nonneg)
        if verdict:
            return True
        if point is not None and _separates(exp, coef, others, point):
            return False
    verdict, point = _guided(exp, coef, others, nonneg)
    if verdict is not None:
        return verdict
    return domination_lp(exp, coef, others, nonneg)[0]


def _guided(exp, coef, others, nonneg):
    """(True, None) if domination is certified, (False, point) if ``point`` separates exactly, else (None, None)."""
    import numpy as np
    from scipy.optimize import linprog

    n = len(exp)
    t = len(others)
    A = np.ones((n + 1, t))
    A[:n] = np.array([e for e, _ in others], dtype=float).T
    b = np.array(list(exp) + [1], dtype=float)
    c = np.array([float(o[1]) for o in others])
    if nonneg:
        res = linprog(c, A_ub=A[:n], b_ub=b[:n], A_eq=A[n:], b_eq=b[n:], bounds=(0, None), method="highs")
    else:
        res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 0:
        cf = float(coef)
        if res.fun <= cf + 1e-7 * (1 + abs(cf)):
            support = [j for j in range(t) if res.x[j] > 1e-9]
            if _check_support(exp, coef, [others[j] for j in support], nonneg, res):
                return True, None
        else:
            if nonneg:
                ye = -res.ineqlin.marginals
                point = [Fraction(max(0.0, float(v))).limit_denominator(1 << 20) for v in ye]
            else:
                ye = res.eqlin.marginals[:n]
                point = [Fraction(-float(v)).limit_denominator(1 << 20) for v in ye]
            if _separates(exp, coef, others, point):
                return False, point
    point = _separation_point(exp, coef, others, nonneg)
    if point is not None and _separates(exp, coef, others, point):
        return False, point
    return None, None


def _separates(exp, coef, others, point) -> bool:
    """Exact test that ``exp`` is strictly below every other monomial at ``point``."""
    import numpy as np

    pt = [Fraction(v) for v in point]
    cs = [coef] + [cc for _, cc in others]
    E = [exp] + [e for e, _ in others]
    den = math.lcm(*(v.denominator for v in pt))
    cden = math.lcm(*{c.denominator for c in cs})
    # Values scaled by den * cden are integers.
    P = [v.numerator * (den // v.denominator) for v in pt]
    C = [c.numerator * (cden // c.denominator) * den for c in cs]
    deg = max((sum(e) for e in E), default=0)
    bound = max(map(abs, C)) + cden * deg * max(map(abs, P), default=0)
    if bound < 1 << 62:
        vals = np.array(E, dtype=np.int64) @ (np.array(P, dtype=np.int64) * cden) + np.array(C, dtype=np.int64)
        return bool(np.all(vals[0] < vals[1:]))
    vals = [c + cden * sum(a * b for a, b in zip(e, P)) for e, c in zip(E, C)]
    return all(vals[0] < v for v in vals[1:])


def _separation_point(exp, coef, others, nonneg):
    """Float LP for a point maximizing the margin below every other monomial."""
    import numpy as np
    from scipy.optimize import linprog

    n = len(exp)
    t = len(others)
    A = np.zeros((t, n + 1))
    rhs = np.zeros(t)
    e0 = np.array(exp, dtype=float)
    for j, (e, cc) in enumerate(others):
        A[j, :n] = -(np.array(e, dtype=float) - e0)
        A[j, n] = 1.0
        rhs[j] = float(cc) - float(coef)
    obj = np.zeros(n + 1)
    obj[n] = -1.0
    lo = 0 if nonneg else None
    bounds = [(lo, None)] * n + [(None, 1.0)]
    res = linprog(obj, A_ub=A, b_ub=rhs, bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    return [Fraction(float(v)).limit_denominator(1 << 20) for v in res.x[:n]]
