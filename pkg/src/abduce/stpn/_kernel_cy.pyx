# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled distance-matrix kernels (hot path of temporal propagation).

Same contract and identical arithmetic as ``_kernel_py``: entries are
float64 holding exact integers or +inf, d[i, j] bounds t(j) - t(i), and
``n`` bounds the used top-left block of the capacity buffer.
"""

BACKEND = "cython"

CONSISTENT = 0
INCONSISTENT = 1

cdef double INF = float("inf")


def closure(double[:, ::1] d, Py_ssize_t n) -> int:
    """In-place Floyd-Warshall; returns 1 on a negative cycle."""
    cdef Py_ssize_t i, j, k
    cdef double dik, v
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik == INF:
                continue
            for j in range(n):
                v = dik + d[k, j]
                if v < d[i, j]:
                    d[i, j] = v
    for i in range(n):
        if d[i, i] < 0:
            return INCONSISTENT
    return CONSISTENT


def update_edges(double[:, ::1] d, Py_ssize_t n, edges) -> int:
    """Re-close after the listed (a, b) edges were lowered in place."""
    cdef Py_ssize_t i, j, a, b
    cdef double w, dia, base, v
    for a, b in edges:
        w = d[a, b]
        if w == INF:
            continue
        for i in range(n):
            dia = d[i, a]
            if dia == INF:
                continue
            base = dia + w
            for j in range(n):
                v = base + d[b, j]
                if v < d[i, j]:
                    d[i, j] = v
        for i in range(n):
            if d[i, i] < 0:
                return INCONSISTENT
    return CONSISTENT
