"""Pure-Python (numpy) fallback for the distance-matrix kernels.

Matrix convention: ``d[i, j]`` is the current upper bound on
``t(j) - t(i)``.  Entries are float64 holding exact integers or ``+inf``;
``-inf`` never appears, so sums cannot produce NaN.  Both kernels perform
identical arithmetic to the compiled version, so results are bit-identical
across backends.  ``n`` bounds the used top-left block of a possibly
larger capacity buffer.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

CONSISTENT = 0
INCONSISTENT = 1


def closure(d: np.ndarray, n: int) -> int:
    """All-pairs shortest paths in place (Floyd-Warshall).

    Returns INCONSISTENT when the graph contains a negative cycle, in
    which case the matrix contents are unspecified.
    """
    m = d[:n, :n]
    for k in range(n):
        np.minimum(m, m[:, k : k + 1] + m[k : k + 1, :], out=m)
    if n and (np.diagonal(m) < 0).any():
        return INCONSISTENT
    return CONSISTENT


def update_edges(d: np.ndarray, n: int, edges: list[tuple[int, int]]) -> int:
    """Re-close a matrix after the listed edges were lowered in place.

    Requires that ``d`` was closed before the edges were written.  Each
    lowered edge is incorporated with one O(n^2) pass; in a consistent
    graph a shortest path uses a given edge at most once, so the pass is
    exact.  Returns INCONSISTENT as soon as a negative diagonal appears.
    """
    m = d[:n, :n]
    for a, b in edges:
        w = m[a, b]
        np.minimum(m, m[:, a : a + 1] + (w + m[b : b + 1, :]), out=m)
        if (np.diagonal(m) < 0).any():
            return INCONSISTENT
    return CONSISTENT
