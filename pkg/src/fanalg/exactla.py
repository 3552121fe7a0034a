"""Exact rational linear algebra: determinants, ranks, interpolation.

Matrices are lists of lists of Fractions (ints coerce on the fly).  Ranks and
determinants use fraction-free elimination, so there are no floating-point
thresholds anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def mat_det(matrix) -> Fraction:
    """Determinant by Bareiss elimination; exact for Fraction/int entries."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    m = [[Fraction(x) for x in row] for row in matrix]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                m[i][j] = (pivot * m[i][j] - mik * m[k][j]) / prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def mat_rank(matrix) -> int:
    """Exact rank over the rationals via Gaussian elimination."""
    if not matrix:
        return 0
    m = [[Fraction(x) for x in row] for row in matrix]
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        pivot_row = None
        for r in range(rank, rows):
            if m[r][c] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pv = m[rank][c]
        for r in range(rank + 1, rows):
            f = m[r][c] / pv
            if f:
                for j in range(c, cols):
                    m[r][j] -= f * m[rank][j]
        rank += 1
        if rank == rows:
            break
    return rank


def submatrix(matrix, rows, cols):
    """Rows and columns picked by 1-based index lists, in the given order."""
    return [[matrix[r - 1][c - 1] for c in cols] for r in rows]


def mat_identity(n) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def newton_interpolate(xs, ys) -> list:
    """Coefficients (ascending powers) of the polynomial through (xs, ys).

    Exact over the rationals; the points must have distinct x values.
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError("point lists of different lengths")
    xs = [Fraction(x) for x in xs]
    divided = [Fraction(y) for y in ys]
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dx = xs[i] - xs[i - level]
            if dx == 0:
                raise ValueError("interpolation points must be distinct")
            divided[i] = (divided[i] - divided[i - 1]) / dx
    # expand the Newton form into monomial coefficients
    coeffs = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # multiply running polynomial by (t - xs[i]) and add divided[i]
        for j in range(n - 1, 0, -1):
            coeffs[j] = coeffs[j - 1] - xs[i] * coeffs[j]
        coeffs[0] = divided[i] - xs[i] * coeffs[0]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_degree(coeffs) -> int:
    """Degree of an ascending coefficient list; -1 for the zero polynomial."""
    for k in range(len(coeffs) - 1, -1, -1):
        if coeffs[k] != 0:
            return k
    return -1


def poly_eval(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def clear_denominators(coeffs) -> list:
    """Scale a rational coefficient list to primitive integers (gcd 1)."""
    den = 1
    for c in coeffs:
        c = Fraction(c)
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return ints
