"""Convex-hull guidance for canonicalization.

qhull (float) proposes which monomials are hull vertices and, for the rest, a
simplex of vertices that dominates them.  Every proposal is then checked
exactly: a vertex needs an exact admissible point where it is the strict
unique minimum, a non-vertex an exact convex combination.  Terms whose
proposal fails stay undecided and go to the exact LP.

The univariate case uses an exact monotone-chain lower hull.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np


UNDECIDED, KEEP, DROP = 0, 1, 2


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull_1d(xs: Sequence[int], cs: Sequence) -> list[int]:
    """Indices of strict lower-hull vertices of points (x, c); xs distinct."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    chain: list[int] = []
    for i in order:
        pt = (xs[i], cs[i])
        while len(chain) >= 2:
            o = (xs[chain[-2]], cs[chain[-2]])
            a = (xs[chain[-1]], cs[chain[-1]])
            if _cross(o, a, pt) <= 0:
                chain.pop()
            else:
                break
        chain.append(i)
    return chain


def _pivot_columns(rows: list[list[int]]) -> list[int]:
    """Columns of a basis for the row space (exact elimination)."""
    mat = [[Fraction(v) for v in r] for r in rows]
    if not mat:
        return []
    ncol = len(mat[0])
    piv = []
    r0 = 0
    for c in range(ncol):
        sel = next((r for r in range(r0, len(mat)) if mat[r][c] != 0), None)
        if sel is None:
            continue
        mat[r0], mat[sel] = mat[sel], mat[r0]
        inv = 1 / mat[r0][c]
        mat[r0] = [v * inv for v in mat[r0]]
        for r in range(len(mat)):
            if r != r0 and mat[r][c] != 0:
                f = mat[r][c]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[r0])]
        piv.append(c)
        r0 += 1
        if r0 == len(mat):
            break
    return piv


def _det_int(M: list[list[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    A = [row[:] for row in M]
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _facet_dominates(e_t, c_t, pts) -> bool:
    """Exact check that e_t is a convex combination of the facet points with lower cost."""
    k = len(e_t)
    cols = len(pts)
    if cols != k + 1:
        return False
    M = [[int(pt[0][i]) for pt in pts] for i in range(k)] + [[1] * cols]
    rhs = [int(x) for x in e_t] + [1]
    det = _det_int(M)
    if det == 0:
        return False
    nums = []
    for j in range(cols):
        Mj = [row[:j] + [rhs[i]] + row[j + 1 :] for i, row in enumerate(M)]
        d = _det_int(Mj)
        if d * det < 0:
            return False
        nums.append(d)
    # Cramer: lambda_j = nums[j] / det; compare sum lambda_j c_j <= c_t.
    total = sum((Fraction(nums[j]) * Fraction(pts[j][1]) for j in range(cols)), Fraction(0))
    return total / det <= c_t


def exact_unique_min(exps, coefs, point) -> int | None:
    """Index of the strict unique minimizing monomial at a rational point."""
    den = 1
    for v in list(point) + list(coefs):
        if isinstance(v, Fraction):
            den = den * v.denominator // math.gcd(den, v.denominator)
    P = [int(v * den) for v in point]
    vals = [int(c * den) + sum(e * p for e, p in zip(ex, P) if e) for ex, c in zip(exps, coefs)]
    best = min(vals)
    hits = [i for i, v in enumerate(vals) if v == best]
    return hits[0] if len(hits) == 1 else None


_GRID = 1 << 12


def _int_coefs(coefs) -> tuple[int, list[int]]:
    den = 1
    for c in coefs:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    return den, [int(c * den) for c in coefs]


def _unique_minimizers(E: np.ndarray, cint: list[int], den: int, points: np.ndarray) -> list[int]:
    """For each float point (snapped to a 1/GRID lattice) the exact strict argmin or -1."""
    Pint = np.rint(points * _GRID).astype(np.int64)  # K x n
    bound = (max(abs(c) for c in cint) + 1) * _GRID + int(E.sum(axis=1).max() + 1) * (int(np.abs(Pint).max()) + 1) * den
    if bound >= (1 << 62):
        C = np.array([c * _GRID for c in cint], dtype=object)
        vals = C[:, None] + E.astype(object) @ (Pint.T.astype(object) * den)
    else:
        C = np.array(cint, dtype=np.int64) * _GRID
        vals = C[:, None] + E @ (Pint.T * den)
    mins = vals.min(axis=0)
    hits = vals == mins[None, :]
    counts = hits.sum(axis=0)
    arg = hits.argmax(axis=0)
    return [int(a) if c == 1 else -1 for a, c in zip(arg, counts)]


def _rational_point(v: np.ndarray, nonneg: bool) -> list[Fraction]:
    out = []
    for x in v:
        q = Fraction(float(x)).limit_denominator(1 << 16)
        if nonneg and q < 0:
            q = Fraction(0)
        out.append(q)
    return out


def hull_classify(exps: list[tuple[int, ...]], coefs: list, alive: list[bool], nonneg: bool) -> list[int]:
    """KEEP / DROP / UNDECIDED for each alive term; dead terms are UNDECIDED."""
    idx = [i for i in range(len(exps)) if alive[i]]
    status = [UNDECIDED] * len(exps)
    if len(idx) <= 1:
        for i in idx:
            status[i] = KEEP
        return status
    n = len(exps[0])
    E0 = [[exps[i][d] - exps[idx[0]][d] for d in range(n)] for i in idx]
    S = _pivot_columns(E0) if not nonneg else list(range(n))
    k = len(S)
    if k == 0:
        return status
    if k == 1 and not nonneg:
        xs = [exps[i][S[0]] for i in idx]
        cs = [coefs[i] for i in idx]
        keep = set(lower_hull_1d(xs, cs))
        for j, i in enumerate(idx):
            status[i] = KEEP if j in keep else DROP
        return status
    if nonneg and n == 1:
        # After the pairwise filter the univariate R+ case is a plain lower hull.
        xs = [exps[i][0] for i in idx]
        cs = [coefs[i] for i in idx]
        keep = set(lower_hull_1d(xs, cs))
        for j, i in enumerate(idx):
            status[i] = KEEP if j in keep else DROP
        return status
    try:
        from scipy.spatial import ConvexHull, QhullError
    except ImportError:  # pragma: no cover
        return status
    Xi = [[exps[i][d] for d in S] for i in idx]
    X = np.array(Xi, dtype=float)
    C = np.array([float(coefs[i]) for i in idx])
    m = len(idx)
    span = float(C.max() - C.min()) + 1.0
    erange = int(X.max() - X.min()) + 1
    # Exact copy of every hull input point: (coordinates, coefficient, owner).
    ex_pts: list[tuple[list[int], object, int]] = [(Xi[j], coefs[idx[j]], j) for j in range(m)]
    rows = [np.column_stack([X, C])]
    top = C.max() + span * 4 + 64.0 * erange
    rows.append(np.column_stack([X, np.full(m, top)]))
    ex_pts += [(Xi[j], None, -1) for j in range(m)]
    if nonneg:
        # Shifted copies model the free increase of exponents over R+.
        far = 64 * (erange + int(span) + 1)
        for d in range(k):
            shifted = X.copy()
            shifted[:, d] += far
            rows.append(np.column_stack([shifted, C]))
            for j in range(m):
                pt = list(Xi[j])
                pt[d] += far
                ex_pts.append((pt, coefs[idx[j]], j))
    P = np.vstack(rows)
    try:
        hull = ConvexHull(P, qhull_options="Qt")
    except (QhullError, ValueError):
        return status
    eq = hull.equations
    lower = eq[:, k] < -1e-12
    simp = hull.simplices[lower]
    eql = eq[lower]
    if not len(simp):
        return status
    good = np.array([all(ex_pts[v][2] >= 0 for v in s) for s in simp])
    simp = simp[good]
    eql = eql[good]
    if not len(simp):
        return status
    normals = eql[:, :k] / eql[:, k : k + 1]
    real_vert = set()
    incident: dict[int, list[int]] = {}
    for f, sv in enumerate(simp):
        for v in sv:
            if v < m:
                real_vert.add(int(v))
                incident.setdefault(int(v), []).append(f)
    sub_exps = [exps[i] for i in idx]
    sub_coefs = [coefs[i] for i in idx]
    centroid = X.mean(axis=0)
    scale = float(np.abs(normals).max()) + 1.0
    verts = sorted(real_vert)
    base = np.array([normals[incident[v]].mean(axis=0) for v in verts])
    inward = centroid[None, :] - X[verts]
    inward /= np.maximum(np.abs(inward).max(axis=1, keepdims=True), 1e-12)
    den, cint = _int_coefs(sub_coefs)
    E = np.array(sub_exps, dtype=np.int64)
    pending = np.ones(len(verts), dtype=bool)
    for step in (0.0, 0.25, 1.0, 4.0, 16.0):
        if not pending.any():
            break
        cand = base[pending] + step * scale * inward[pending]
        if nonneg:
            cand = np.maximum(cand, 0.0)
        full = np.zeros((len(cand), n))
        full[:, S] = cand
        won = _unique_minimizers(E, cint, den, full)
        rows = np.nonzero(pending)[0]
        for r, w in zip(rows, won):
            if w == verts[r]:
                status[idx[verts[r]]] = KEEP
                pending[r] = False
    rest = [j for j in range(m) if status[idx[j]] != KEEP]
    if rest:
        Xs = P[simp][:, :, :k]
        F = len(simp)
        A = np.concatenate([np.transpose(Xs, (0, 2, 1)), np.ones((F, 1, k + 1))], axis=1)
        det = np.linalg.det(A)
        regular = np.abs(det) > 1e-9
        simp = simp[regular]
        A = A[regular]
        inv = np.linalg.inv(A) if len(A) else None
        if inv is not None:
            q = np.concatenate([X[rest].T, np.ones((1, len(rest)))], axis=0)
            lam = inv @ q
            ok = np.all(lam >= -1e-9, axis=1)
            for r_i, j in enumerate(rest):
                for f in np.nonzero(ok[:, r_i])[0][:3]:
                    verts = [int(v) for v in simp[f]]
                    if any(ex_pts[v][2] == j for v in verts):
                        continue
                    if _facet_dominates(Xi[j], sub_coefs[j], [ex_pts[v] for v in verts]):
                        status[idx[j]] = DROP
                        break
    return status
