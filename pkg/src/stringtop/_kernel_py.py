"""Pure-Python exact elimination kernel.

Reference implementation of the two hot routines.  The compiled module
``stringtop._kernel`` exports the same functions with the same results;
``stringtop.kernel`` picks one at import time.
"""

from math import gcd


def _primitive(row):
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def rref_int(rows, ncols):
    """Fraction-free Gauss-Jordan elimination on integer rows.

    Returns ``(reduced, pivots)``: the nonzero rows of the reduced form in
    pivot order (each row primitive, pivot entry positive, every other row
    zero in that pivot column) and the list of pivot columns.
    """
    work = [list(r) for r in rows if any(r)]
    reduced = []
    pivots = []
    for col in range(ncols):
        best = -1
        for i, r in enumerate(work):
            v = r[col]
            if v and (best < 0 or abs(v) < abs(work[best][col])):
                best = i
                if abs(v) == 1:
                    break
        if best < 0:
            continue
        prow = work.pop(best)
        if prow[col] < 0:
            prow = [-v for v in prow]
        prow = _primitive(prow)
        p = prow[col]
        for group in (work, reduced):
            for i, r in enumerate(group):
                c = r[col]
                if c:
                    g = gcd(p, c)
                    a, b = p // g, c // g
                    nr = [a * x - b * y for x, y in zip(r, prow)]
                    group[i] = _primitive(nr)
        work = [r for r in work if any(r)]
        reduced.append(prow)
        pivots.append(col)
    # earlier pivot rows were rescaled by positive factors only
    for i, r in enumerate(reduced):
        if r[pivots[i]] < 0:
            reduced[i] = [-v for v in r]
    return reduced, pivots


def independent_rows(rows, ncols):
    """Indices of the rows that are independent of all earlier rows."""
    basis = {}  # pivot column -> primitive row with that leading entry
    keep = []
    for idx, row in enumerate(rows):
        r = list(row)
        for col in range(ncols):
            c = r[col]
            if not c:
                continue
            prow = basis.get(col)
            if prow is None:
                basis[col] = _primitive(r)
                keep.append(idx)
                break
            p = prow[col]
            g = gcd(p, c)
            a, b = p // g, c // g
            r = _primitive([a * x - b * y for x, y in zip(r, prow)])
    return keep
