# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: edit distance and DBSCAN label propagation."""
import numpy as np

from libc.stdlib cimport free, malloc


cdef Py_ssize_t _lev(const int* a, Py_ssize_t n, const int* b, Py_ssize_t m,
                     Py_ssize_t* row) noexcept nogil:
    cdef Py_ssize_t i, j, prev, cur, best
    if n == 0:
        return m
    if m == 0:
        return n
    for j in range(m + 1):
        row[j] = j
    for i in range(1, n + 1):
        prev = row[0]
        row[0] = i
        for j in range(1, m + 1):
            cur = row[j]
            if a[i - 1] == b[j - 1]:
                best = prev
            else:
                best = prev
                if cur < best:
                    best = cur
                if row[j - 1] < best:
                    best = row[j - 1]
                best += 1
            row[j] = best
            prev = cur
    return row[m]


cdef int* _codes(str s) except NULL:
    cdef Py_ssize_t k = 0
    cdef Py_UCS4 ch
    cdef int* buf = <int*> malloc((len(s) + 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    for ch in s:
        buf[k] = <int> ch
        k += 1
    return buf


def levenshtein(str a, str b):
    cdef Py_ssize_t n = len(a), m = len(b), d
    if n == 0:
        return m
    if m == 0:
        return n
    cdef int* ca = _codes(a)
    cdef int* cb = _codes(b)
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    try:
        if row == NULL:
            raise MemoryError()
        d = _lev(ca, n, cb, m, row)
    finally:
        free(ca)
        free(cb)
        free(row)
    return d


def pairwise_levenshtein(list strings):
    cdef Py_ssize_t n = len(strings), i, j, total = 0, longest = 0, k
    cdef Py_UCS4 ch
    lengths = np.zeros(n, dtype=np.intp)
    offsets = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t[::1] lv = lengths
    cdef Py_ssize_t[::1] ov = offsets
    for i in range(n):
        s = strings[i]
        lv[i] = len(s)
        ov[i] = total
        total += lv[i]
        if lv[i] > longest:
            longest = lv[i]
    codes = np.zeros(max(total, 1), dtype=np.intc)
    cdef int[::1] cv = codes
    for i in range(n):
        k = ov[i]
        for ch in <str> strings[i]:
            cv[k] = <int> ch
            k += 1
    out = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, ::1] outv = out
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc((longest + 1) * sizeof(Py_ssize_t))
    if row == NULL:
        raise MemoryError()
    cdef const int* base = &cv[0]
    try:
        with nogil:
            for i in range(n):
                for j in range(i + 1, n):
                    outv[i, j] = _lev(base + ov[i], lv[i], base + ov[j], lv[j], row)
                    outv[j, i] = outv[i, j]
    finally:
        free(row)
    return out


def dbscan_labels(const double[:, ::1] dist, double eps, Py_ssize_t min_pts):
    cdef Py_ssize_t n = dist.shape[0], i, j, p, top, cid = 0, cnt
    labels = np.full(n, -1, dtype=np.intp)
    core = np.zeros(n, dtype=np.uint8)
    stack = np.zeros(max(n, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] lab = labels
    cdef unsigned char[::1] cr = core
    cdef Py_ssize_t[::1] st = stack
    with nogil:
        for i in range(n):
            cnt = 0
            for j in range(n):
                if dist[i, j] <= eps:
                    cnt += 1
            cr[i] = cnt >= min_pts
        for i in range(n):
            if lab[i] != -1 or not cr[i]:
                continue
            lab[i] = cid
            top = 0
            st[top] = i
            top += 1
            while top > 0:
                top -= 1
                p = st[top]
                for j in range(n):
                    if lab[j] == -1 and dist[p, j] <= eps:
                        lab[j] = cid
                        if cr[j]:
                            st[top] = j
                            top += 1
            cid += 1
    return labels
