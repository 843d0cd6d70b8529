# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact elimination kernel.

Same contract as ``stringtop._kernel_py``.  Matrices whose entries fit in
64 bits are reduced in C with overflow-checked arithmetic; on overflow (or
oversized input) the routine reruns on Python integers.
"""

from libc.stdlib cimport malloc, free

from stringtop import _kernel_py

cdef extern from *:
    """
    static int st_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int st_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int st_mul(long long a, long long b, long long *r) nogil
    int st_sub(long long a, long long b, long long *r) nogil


cdef inline long long _abs(long long v) nogil:
    return -v if v < 0 else v


cdef inline long long _gcd(long long a, long long b) nogil:
    a = _abs(a)
    b = _abs(b)
    while b:
        a, b = b, a % b
    return a


cdef inline void _make_primitive(long long *row, Py_ssize_t n) nogil:
    cdef long long g = 0
    cdef Py_ssize_t j
    for j in range(n):
        if row[j]:
            g = _gcd(g, row[j])
            if g == 1:
                return
    if g > 1:
        for j in range(n):
            row[j] //= g



cdef inline int _eliminate(long long *r, long long *prow, Py_ssize_t col,
                           Py_ssize_t n) nogil:
    """r <- a*r - b*prow so that r[col] == 0; returns 1 on overflow."""
    cdef long long p = prow[col]
    cdef long long c = r[col]
    cdef long long g = _gcd(p, c)
    cdef long long a = p // g
    cdef long long b = c // g
    cdef long long x, y
    cdef Py_ssize_t j
    for j in range(n):
        if st_mul(a, r[j], &x):
            return 1
        if st_mul(b, prow[j], &y):
            return 1
        if st_sub(x, y, &r[j]):
            return 1
    _make_primitive(r, n)
    return 0


# entries are kept well inside int64 so that abs() never overflows
cdef long long _LIMIT = 1LL << 62


cdef long long *_load(list rows, Py_ssize_t m, Py_ssize_t n) except? NULL:
    cdef long long *buf = <long long *> malloc(max(m * n, 1) * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef object v
    for i in range(m):
        row = rows[i]
        for j in range(n):
            v = row[j]
            if v >= _LIMIT or v <= -_LIMIT:
                free(buf)
                return NULL
            buf[i * n + j] = v
    return buf


def rref_int(rows, Py_ssize_t ncols):
    rows = [r for r in rows if any(r)]
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = ncols
    if m == 0 or n == 0:
        return [], []
    cdef long long *buf = _load(rows, m, n)
    if buf == NULL:
        return _kernel_py.rref_int(rows, ncols)
    cdef Py_ssize_t *order = <Py_ssize_t *> malloc(m * sizeof(Py_ssize_t))
    cdef Py_ssize_t *pivcol = <Py_ssize_t *> malloc(m * sizeof(Py_ssize_t))
    cdef Py_ssize_t nred = 0   # rows order[0:nred] are finished pivot rows
    cdef Py_ssize_t col, i, k, best, j
    cdef long long v, bv
    cdef bint overflow = False
    for i in range(m):
        order[i] = i
    try:
        for col in range(n):
            best = -1
            bv = 0
            for k in range(nred, m):
                v = buf[order[k] * n + col]
                if v and (best < 0 or _abs(v) < bv):
                    best = k
                    bv = _abs(v)
                    if bv == 1:
                        break
            if best < 0:
                continue
            order[nred], order[best] = order[best], order[nred]
            i = order[nred]
            if buf[i * n + col] < 0:
                for j in range(n):
                    buf[i * n + j] = -buf[i * n + j]
            _make_primitive(&buf[i * n], n)
            for k in range(m):
                if k == nred:
                    continue
                if buf[order[k] * n + col]:
                    if _eliminate(&buf[order[k] * n], &buf[i * n], col, n):
                        overflow = True
                        break
                    for j in range(n):
                        if _abs(buf[order[k] * n + j]) >= _LIMIT:
                            overflow = True
                            break
                    if overflow:
                        break
            if overflow:
                break
            pivcol[nred] = col
            nred += 1
            if nred == m:
                break
        if overflow:
            return _kernel_py.rref_int(rows, ncols)
        reduced = []
        pivots = []
        for k in range(nred):
            i = order[k]
            reduced.append([buf[i * n + j] for j in range(n)])
            pivots.append(pivcol[k])
        return reduced, pivots
    finally:
        free(buf)
        free(order)
        free(pivcol)


def independent_rows(rows, Py_ssize_t ncols):
    rows = list(rows)
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t n = ncols
    if m == 0 or n == 0:
        return []
    cdef long long *buf = _load(rows, m, n)
    if buf == NULL:
        return _kernel_py.independent_rows(rows, ncols)
    # basis rows are stored by pivot column; owner[col] = row index or -1
    cdef Py_ssize_t *owner = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t idx, col, j
    cdef long long *r
    cdef bint overflow = False
    keep = []
    for col in range(n):
        owner[col] = -1
    try:
        for idx in range(m):
            r = &buf[idx * n]
            for col in range(n):
                if not r[col]:
                    continue
                if owner[col] < 0:
                    _make_primitive(r, n)
                    owner[col] = idx
                    keep.append(idx)
                    break
                if _eliminate(r, &buf[owner[col] * n], col, n):
                    overflow = True
                    break
                for j in range(n):
                    if _abs(r[j]) >= _LIMIT:
                        overflow = True
                        break
                if overflow:
                    break
            if overflow:
                break
        if overflow:
            return _kernel_py.independent_rows(rows, ncols)
        return keep
    finally:
        free(buf)
        free(owner)
