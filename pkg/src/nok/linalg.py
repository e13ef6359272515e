"""Small exact linear algebra kernels on integer and rational matrices.

Everything here operates on lists of tuples; matrices are tiny (at most the
ambient dimension plus one), so fraction-free elimination is plenty fast.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def reduce_int_vector(v):
    """Divide an integer vector by the gcd of its entries (sign preserved)."""
    g = 0
    for x in v:
        g = gcd(g, x)
        if g == 1:
            return tuple(v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def int_det(rows) -> int:
    """Determinant of a square integer matrix via Bareiss elimination."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_rank(rows, ncols=None) -> int:
    """Rank of an integer matrix (fraction-free row echelon)."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    if ncols is None:
        ncols = len(m[0])
    rank = 0
    col = 0
    while rank < len(m) and col < ncols:
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pr = m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][col] != 0:
                a, b = pr[col], m[i][col]
                m[i] = [a * m[i][j] - b * pr[j] for j in range(ncols)]
        rank += 1
        col += 1
    return rank


def affine_rank(points) -> int:
    """Dimension of the affine hull of rational points (0 for a single point)."""
    pts = list(points)
    if len(pts) <= 1:
        return 0
    base = pts[0]
    rows = []
    for p in pts[1:]:
        diff = [Fraction(a) - Fraction(b) for a, b in zip(p, base)]
        den = 1
        for d in diff:
            den = den * d.denominator // gcd(den, d.denominator)
        rows.append(tuple(int(d * den) for d in diff))
    return int_rank(rows, len(base))


def solve_fraction_system(a_rows, rhs):
    """Solve A x = rhs exactly for a square nonsingular Fraction matrix."""
    n = len(a_rows)
    m = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(a_rows, rhs)]
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        m[k], m[pivot] = m[pivot], m[k]
        pk = m[k][k]
        for i in range(n):
            if i == k or m[i][k] == 0:
                continue
            factor = m[i][k] / pk
            m[i] = [m[i][j] - factor * m[k][j] for j in range(n + 1)]
    return [m[i][n] / m[i][i] for i in range(n)]
