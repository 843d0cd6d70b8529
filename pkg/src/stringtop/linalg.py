"""Dense exact linear algebra over Q.

Matrices are lists of rows of ``Fraction``; because an empty list carries no
column count, every routine that needs it takes ``ncols`` explicitly.
Elimination is delegated to :mod:`stringtop.kernel` on integer rows.
"""

from fractions import Fraction
from math import lcm

from stringtop import kernel

ZERO = Fraction(0)
ONE = Fraction(1)


def zeros(nrows, ncols):
    return [[ZERO] * ncols for _ in range(nrows)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def transpose(matrix, ncols):
    return [[row[j] for row in matrix] for j in range(ncols)]


def matmul(a, b, ncols_b):
    """Product of an (r x k) and a (k x ncols_b) matrix."""
    out = []
    for row in a:
        acc = [ZERO] * ncols_b
        for k, v in enumerate(row):
            if v:
                for j, w in enumerate(b[k]):
                    if w:
                        acc[j] += v * w
        out.append(acc)
    return out


def matvec(matrix, vec):
    return [sum((v * w for v, w in zip(row, vec) if v and w), ZERO) for row in matrix]


def is_zero(matrix):
    return all(not v for row in matrix for v in row)


def _int_row(row):
    """Scale a row of ints/Fractions to a row of ints."""
    den = 1
    for v in row:
        if v and v.denominator != 1:
            den = lcm(den, v.denominator)
    if den == 1:
        return [v.numerator for v in row]
    return [v.numerator * (den // v.denominator) for v in row]


def rref(matrix, ncols):
    """Reduced row echelon form: ``(rows, pivots)`` with unit pivots."""
    reduced, pivots = kernel.rref_int([_int_row(r) for r in matrix], ncols)
    out = []
    for row, p in zip(reduced, pivots):
        lead = row[p]
        out.append([Fraction(v, lead) for v in row])
    return out, pivots


def rank(matrix, ncols):
    if not matrix or not ncols:
        return 0
    return len(kernel.rref_int([_int_row(r) for r in matrix], ncols)[1])


def nullspace(matrix, ncols):
    """Basis of {v : matrix v = 0}, one vector per free column, in column order."""
    rows, pivots = rref(matrix, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for row, p in zip(rows, pivots):
            if row[free]:
                v[p] = -row[free]
        basis.append(v)
    return basis


def independent_rows(vectors, ncols):
    """Indices of vectors independent of all earlier ones (greedy, in order)."""
    if not vectors or not ncols:
        return []
    return kernel.independent_rows([_int_row(v) for v in vectors], ncols)


def row_space(vectors, ncols):
    """Canonical (RREF) basis of the span of ``vectors``."""
    return rref(vectors, ncols)[0]


def inverse(matrix):
    n = len(matrix)
    aug = [list(row) + e for row, e in zip(matrix, identity(n))]
    rows, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in rows[:n]]


def solve(matrix, rhs, ncols):
    """One solution x of ``matrix x = rhs`` or ``None`` if inconsistent."""
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [ZERO] * ncols
    for row, p in zip(rows, pivots):
        x[p] = row[ncols]
    return x
