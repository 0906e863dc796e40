"""Independent brute-force oracles used by the test suite.

Everything here is deliberately written against plain Python data
structures (dicts of dicts, None as "no edge") so it shares no code or
representation with the package under test.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

Edge = Tuple[int, int, float]  # (from, to, weight)


def fw_shortest_paths(n_nodes: int, edges: Sequence[Edge]):
    """Textbook Floyd-Warshall over adjacency dicts.

    Returns (consistent, dist) where dist[i][j] is the shortest path
    weight or None when unreachable.  consistent is False when some
    diagonal entry goes negative.
    """
    dist: List[List[Optional[float]]] = [
        [0 if i == j else None for j in range(n_nodes)] for i in range(n_nodes)
    ]
    for a, b, w in edges:
        if dist[a][b] is None or w < dist[a][b]:
            dist[a][b] = w
    for k in range(n_nodes):
        for i in range(n_nodes):
            dik = dist[i][k]
            if dik is None:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n_nodes):
                dkj = row_k[j]
                if dkj is None:
                    continue
                cand = dik + dkj
                if row_i[j] is None or cand < row_i[j]:
                    row_i[j] = cand
    consistent = all(dist[i][i] is not None and dist[i][i] >= 0 for i in range(n_nodes))
    return consistent, dist


def stp_edges(constraints: Sequence[Tuple[int, int, float, float]]) -> List[Edge]:
    """Distance-graph edges for (a, b, low, high) difference constraints."""
    edges: List[Edge] = []
    for a, b, low, high in constraints:
        if high != float("inf"):
            edges.append((a, b, high))
        if low != float("-inf"):
            edges.append((b, a, -low))
    return edges


def stp_minimal(n_nodes: int, constraints) -> Optional[Dict[Tuple[int, int], Tuple[float, float]]]:
    """Tight intervals for every ordered pair, or None when inconsistent."""
    consistent, dist = fw_shortest_paths(n_nodes, stp_edges(constraints))
    if not consistent:
        return None
    inf = float("inf")
    out: Dict[Tuple[int, int], Tuple[float, float]] = {}
    for a in range(n_nodes):
        for b in range(n_nodes):
            if a == b:
                continue
            high = dist[a][b] if dist[a][b] is not None else inf
            low = -dist[b][a] if dist[b][a] is not None else -inf
            out[(a, b)] = (low, high)
    return out


def has_negative_cycle_exhaustive(n_nodes: int, edges: Sequence[Edge]) -> bool:
    """Negative-cycle detection by enumerating every simple cycle."""
    best: Dict[Tuple[int, int], float] = {}
    for a, b, w in edges:
        if (a, b) not in best or w < best[(a, b)]:
            best[(a, b)] = w
    nodes = list(range(n_nodes))
    for size in range(1, n_nodes + 1):
        for subset in itertools.combinations(nodes, size):
            start = subset[0]
            for perm in itertools.permutations(subset[1:]):
                cycle = (start,) + perm + (start,)
                total = 0.0
                ok = True
                for u, v in zip(cycle, cycle[1:]):
                    if (u, v) not in best:
                        ok = False
                        break
                    total += best[(u, v)]
                if ok and total < 0:
                    return True
    return False


def enumerate_assignments(n_nodes: int, constraints, lo: int, hi: int):
    """Yield every integer assignment (node 0 fixed at 0) satisfying all
    difference constraints.  Exponential; only for tiny networks."""
    for values in itertools.product(range(lo, hi + 1), repeat=n_nodes - 1):
        t = (0,) + values
        if all(low <= t[b] - t[a] <= high for a, b, low, high in constraints):
            yield t


def derivable(rules, start: str, symbols: Sequence[str]) -> bool:
    """Right-linear grammar derivability by memoised recursion.

    ``rules`` maps a non-terminal to a list of (terminal, next) pairs with
    ``next`` None for terminal-final rules.  A terminal matches a symbol
    by equality.
    """
    n = len(symbols)
    memo: Dict[Tuple[str, int], bool] = {}

    def derives(nt: str, i: int) -> bool:
        key = (nt, i)
        if key in memo:
            return memo[key]
        memo[key] = False  # cycle guard: no progress without consuming input
        result = False
        for terminal, nxt in rules.get(nt, ()):
            if i < n and symbols[i] == terminal:
                if nxt is None:
                    if i + 1 == n:
                        result = True
                        break
                elif derives(nxt, i + 1):
                    result = True
                    break
        memo[key] = result
        return result

    return derives(start, 0)
