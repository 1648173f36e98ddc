"""Exact linear algebra: Gaussian elimination over Q, fraction-free
elimination (Bareiss) over the Laurent ring Q[q, hbar^(-1)].

Matrices are lists of lists. Nothing here is numeric; tolerance-based
checks live next to the geometry code that needs them.
"""

from __future__ import annotations

from gmpy2 import mpq

from .algebra import LaurentPoly


# ---------------------------------------------------------------------------
# field case: gmpy2 rationals
# ---------------------------------------------------------------------------


def mpq_rref(rows, ncols):
    """Reduced row echelon form in place; returns list of pivot columns."""
    rows = [list(map(mpq, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def mpq_nullspace(matrix, ncols):
    """Basis of the right kernel of a matrix over Q."""
    if not matrix:
        basis = []
        for j in range(ncols):
            v = [mpq(0)] * ncols
            v[j] = mpq(1)
            basis.append(v)
        return basis
    rref, pivots = mpq_rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [mpq(0)] * ncols
        v[fc] = mpq(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        basis.append(v)
    return basis


def mpq_solve_unique(matrix, rhs):
    """Solve A x = b over Q, requiring existence and uniqueness.

    Raises ValueError naming the defect (inconsistent / underdetermined).
    """
    n_rows = len(matrix)
    assert n_rows == len(rhs)
    ncols = len(matrix[0]) if n_rows else 0
    aug = [list(map(mpq, row)) + [mpq(b)] for row, b in zip(matrix, rhs)]
    rref, pivots = mpq_rref(aug, ncols + 1)
    if ncols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < ncols:
        raise ValueError("underdetermined linear system (rank %d of %d)" % (len(pivots), ncols))
    x = [mpq(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rref[r][ncols]
    return x


def mpq_rank(matrix, ncols):
    if not matrix:
        return 0
    _, pivots = mpq_rref(matrix, ncols)
    return len(pivots)


# ---------------------------------------------------------------------------
# ring case: fraction-free elimination over Q[q, hbar^(-1)]
# ---------------------------------------------------------------------------


def laurent_det(matrix):
    """Determinant of a square LaurentPoly matrix by Bareiss elimination.

    All interior divisions are exact by the Sylvester identity, so entries
    stay in the ring and never become true fractions.
    """
    n = len(matrix)
    if n == 0:
        return LaurentPoly.const(1)
    m = [row[:] for row in matrix]
    sign = 1
    prev = LaurentPoly.const(1)
    for k in range(n - 1):
        if not m[k][k]:
            swap = None
            for i in range(k + 1, n):
                if m[i][k]:
                    swap = i
                    break
            if swap is None:
                return LaurentPoly()
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
            m[i][k] = LaurentPoly()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def laurent_rank(matrix):
    """Rank of a LaurentPoly matrix (fraction-free row reduction)."""
    if not matrix:
        return 0
    m = [row[:] for row in matrix]
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = LaurentPoly.const(1)
    row = 0
    for col in range(ncols):
        pr = None
        for i in range(row, nrows):
            if m[i][col]:
                pr = i
                break
        if pr is None:
            continue
        m[row], m[pr] = m[pr], m[row]
        for i in range(row + 1, nrows):
            for j in range(col + 1, ncols):
                num = m[row][col] * m[i][j] - m[i][col] * m[row][j]
                m[i][j] = num.exact_div(prev)
            m[i][col] = LaurentPoly()
        prev = m[row][col]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def laurent_nullvector_last_one(matrix):
    """Unique right nullvector of an r x (r+1) rank-r matrix, normalized so
    the last entry is 1; entries must land back in the Laurent ring.

    Uses maximal minors: v_k = (-1)^k det(matrix without column k), then
    divides by the last minor. Verifies A v = 0 exactly before returning.
    """
    nrows = len(matrix)
    ncols = len(matrix[0])
    assert ncols == nrows + 1, "need corank-one shape"
    minors = []
    for k in range(ncols):
        sub = [[row[j] for j in range(ncols) if j != k] for row in matrix]
        d = laurent_det(sub)
        minors.append(d if k % 2 == 0 else -d)
    last = minors[-1]
    if not last:
        raise ValueError("last maximal minor vanishes; cannot normalize")
    v = [mk.exact_div(last) for mk in minors]
    for row in matrix:
        acc = LaurentPoly()
        for a, b in zip(row, v):
            acc = acc + a * b
        if acc:
            raise ValueError("nullvector verification failed")
    return v
