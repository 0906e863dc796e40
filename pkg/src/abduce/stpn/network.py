"""Simple temporal networks: binary difference constraints over time points.

A constraint ``(a, b, [l, u])`` means ``l <= t(b) - t(a) <= u`` with all
times in integer milliseconds.  Consistency and tightest implied bounds
are computed on the distance graph (edge a->b with weight u, edge b->a
with weight -l): the network is consistent iff that graph has no negative
cycle, and the tight interval for a pair is ``[-d(b, a), d(a, b)]`` where
``d`` is the shortest-path matrix.

Two representations coexist:

* *pinned* variables have an exactly known time (an ``[x, x]`` anchor to
  the origin).  Constraints between pinned variables are checked by plain
  arithmetic and constraints between a pinned and a floating variable
  collapse to unary bounds, so pinned variables never enter the matrix.
* *floating* variables live in a dense distance matrix maintained
  incrementally by the kernel backend (compiled when available).

``minimal_network`` recomputes everything from the raw constraint store
with a full Floyd-Warshall pass; it is the reference the incremental path
is validated against.

Networks are single-writer values.  ``clone`` is copy-on-write: clones
behave as fully independent networks, and a frozen network can be read
from any thread.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..timeunits import INF, MAX_ABS_MS, NEG_INF
from . import _backend

Interval = Tuple[float, float]


class Consistency(Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    UNKNOWN = "unknown"


class Outcome(Enum):
    """Result of intersecting a new constraint with the stored one."""

    TIGHTENED = "tightened"
    UNCHANGED = "unchanged"
    EMPTY_INTERSECTION = "empty-intersection"


class UnknownVariableError(KeyError):
    pass


class InconsistentNetworkError(RuntimeError):
    pass


@dataclass(frozen=True)
class TemporalVariable:
    """Opaque time-point handle.  Ids are never reused within a lineage."""

    id: int
    kind: str  # "origin" | "event"


@dataclass(frozen=True)
class TemporalConstraint:
    from_var: TemporalVariable
    to_var: TemporalVariable
    low: float
    high: float

    def __post_init__(self):
        _check_bounds(self.low, self.high)


def _check_bounds(low: float, high: float) -> None:
    for v in (low, high):
        if v != v:
            raise ValueError("constraint bound is NaN")
        if v not in (INF, NEG_INF):
            if v != int(v):
                raise ValueError(f"constraint bound {v!r} is not an integer")
            if abs(v) > MAX_ABS_MS:
                raise ValueError(f"constraint bound {v!r} exceeds the engine range")
    if low > high:
        raise ValueError(f"empty interval [{low}, {high}]")


def _intersect(a: Interval, b: Interval) -> Optional[Interval]:
    low = max(a[0], b[0])
    high = min(a[1], b[1])
    if low > high:
        return None
    return (low, high)


class _IdAllocator:
    """Shared by a network and all its clones so ids stay lineage-unique."""

    __slots__ = ("_next",)

    def __init__(self, start: int = 0):
        self._next = start

    def take(self) -> int:
        value = self._next
        self._next = value + 1
        return value


class STPNetwork:
    """Pins (exactly known times) are stored in a table shared by the whole
    clone lineage: variable ids are lineage-unique and a pin is written at
    most once with one value, so sharing is safe and forking needs no pin
    copies.  Everything branch-specific (the floating-variable matrix, raw
    constraints, membership order) is copy-on-write."""

    __slots__ = (
        "_alloc",
        "origin",
        "_pins",
        "_rows",
        "_m",
        "_n",
        "_cons",
        "_pending",
        "_state",
        "_shared",
        "_order",
    )

    def __init__(self, first_var_id: int = 0):
        self._alloc = _IdAllocator(first_var_id)
        self.origin = TemporalVariable(self._alloc.take(), "origin")
        self._pins: Dict[int, int] = {self.origin.id: 0}  # lineage-shared
        self._rows: Dict[int, int] = {self.origin.id: 0}
        self._m = np.full((8, 8), INF, dtype=np.float64)
        np.fill_diagonal(self._m, 0.0)
        self._n = 1
        self._cons: Dict[Tuple[int, int], Interval] = {}
        self._pending: List[Tuple[int, int]] = []
        self._state = Consistency.CONSISTENT
        self._shared = False
        self._order: List[TemporalVariable] = [self.origin]

    # -- variables ---------------------------------------------------------

    def add_variable(self, kind: str = "event") -> TemporalVariable:
        """Create a fresh unconstrained (floating) variable."""
        if kind == "origin":
            raise ValueError("a network has exactly one origin")
        var = TemporalVariable(self._alloc.take(), kind)
        self.bind_free(var)
        return var

    def new_variable(self, kind: str = "event") -> TemporalVariable:
        """Allocate a handle without binding it into this network yet."""
        return TemporalVariable(self._alloc.take(), kind)

    def bind_free(self, var: TemporalVariable) -> None:
        """Bind an existing handle as a floating matrix variable."""
        if var.id in self._rows or var.id in self._pins:
            return
        self._own()
        row = self._n
        if row == self._m.shape[0]:
            self._grow()
        self._m[row, : row + 1] = INF
        self._m[: row + 1, row] = INF
        self._m[row, row] = 0.0
        self._n = row + 1
        self._rows[var.id] = row
        self._order.append(var)

    def bind_point(self, var: TemporalVariable, t: int) -> None:
        """Bind an existing handle at an exactly known time.

        The pin table is lineage-shared; a handle already pinned by a
        sibling branch carries the same time (evidence times are global
        facts), so re-binding it here only records membership.
        """
        if var.id in self._rows:
            raise ValueError("variable already bound as floating")
        known = self._pins.get(var.id)
        if known is not None:
            if known != t:
                raise ValueError("variable already pinned at a different time")
            return
        if not isinstance(t, int) or abs(t) > MAX_ABS_MS:
            raise ValueError(f"pin time {t!r} out of range")
        self._own()
        self._pins[var.id] = t
        self._order.append(var)

    def is_bound(self, var: TemporalVariable) -> bool:
        return var.id in self._rows or var.id in self._pins

    @property
    def variables(self) -> Tuple[TemporalVariable, ...]:
        return tuple(self._order)

    @property
    def consistency_flag(self) -> Consistency:
        return self._state

    # -- constraints -------------------------------------------------------

    def add_constraint(self, *args) -> Outcome:
        """Intersect a constraint into the network.

        Accepts either a ``TemporalConstraint`` or ``(from_var, to_var,
        low, high)``.  Returns the intersection outcome; an empty
        intersection marks the network inconsistent.
        """
        if len(args) == 1:
            c = args[0]
            va, vb, low, high = c.from_var, c.to_var, c.low, c.high
        else:
            va, vb, low, high = args
            _check_bounds(low, high)
        for v in (va, vb):
            if not self.is_bound(v):
                raise UnknownVariableError(f"variable {v.id} is not in this network")

        # Fast path: both points exactly known.  The pin pair already
        # implies the tight interval [d, d]; a wider constraint changes
        # nothing and a disjoint one is an empty intersection.  Nothing is
        # stored and no propagation is needed.
        a_pin = self._pins.get(va.id)
        b_pin = self._pins.get(vb.id)
        if a_pin is not None and b_pin is not None:
            if low <= b_pin - a_pin <= high:
                return Outcome.UNCHANGED
            self._state = Consistency.INCONSISTENT
            return Outcome.EMPTY_INTERSECTION

        key = (va.id, vb.id)
        stored = self._cons.get(key, (NEG_INF, INF))
        merged = _intersect(stored, (low, high))
        if merged is None:
            self._state = Consistency.INCONSISTENT
            return Outcome.EMPTY_INTERSECTION
        if merged == stored:
            return Outcome.UNCHANGED

        self._own()
        self._cons[key] = merged
        self._post_edges(va, vb, merged[0], merged[1])
        if self._state is Consistency.CONSISTENT:
            self._state = Consistency.UNKNOWN
        return Outcome.TIGHTENED

    def _post_edges(self, va, vb, low, high) -> None:
        """Write the distance-graph edges for one constraint (at least one
        endpoint floating; pin-pin pairs short-circuit earlier)."""
        a_pin = self._pins.get(va.id)
        b_pin = self._pins.get(vb.id)
        if a_pin is not None:
            # t(b) in [a_pin + low, a_pin + high] relative to origin.
            jb = self._rows[vb.id]
            if high < INF:
                self._lower(0, jb, a_pin + high)
            if low > NEG_INF:
                self._lower(jb, 0, -(a_pin + low))
            return
        if b_pin is not None:
            # t(a) in [b_pin - high, b_pin - low] relative to origin.
            ja = self._rows[va.id]
            if low > NEG_INF:
                self._lower(0, ja, b_pin - low)
            if high < INF:
                self._lower(ja, 0, high - b_pin)
            return
        ja, jb = self._rows[va.id], self._rows[vb.id]
        if high < INF:
            self._lower(ja, jb, high)
        if low > NEG_INF:
            self._lower(jb, ja, -low)

    def _lower(self, i: int, j: int, w: float) -> None:
        if w < self._m[i, j]:
            self._m[i, j] = w
            self._pending.append((i, j))

    # -- propagation and queries -------------------------------------------

    def _refresh(self) -> None:
        if self._state is Consistency.INCONSISTENT:
            return
        if self._pending:
            # Propagation mutates the matrix; never write a shared one.
            self._own()
            status = _backend.update_edges(self._m, self._n, self._pending)
            self._pending = []
            self._state = (
                Consistency.CONSISTENT
                if status == _backend.CONSISTENT
                else Consistency.INCONSISTENT
            )
        elif self._state is Consistency.UNKNOWN:
            self._state = Consistency.CONSISTENT

    def is_consistent(self) -> bool:
        self._refresh()
        return self._state is Consistency.CONSISTENT

    def propagate_incremental(self, changed: Optional[TemporalConstraint] = None) -> Consistency:
        """Propagate constraints stored since the last refresh.

        The update incorporates each lowered edge with one pass over the
        closed matrix and agrees exactly with a full recomputation.
        """
        self._refresh()
        return self._state

    def variable_bounds(self, var: TemporalVariable) -> Interval:
        """Tight interval of ``t(var) - t(origin)``."""
        if not self.is_bound(var):
            raise UnknownVariableError(f"variable {var.id} is not in this network")
        self._refresh()
        if self._state is Consistency.INCONSISTENT:
            raise InconsistentNetworkError("network is inconsistent")
        pin = self._pins.get(var.id)
        if pin is not None:
            return (pin, pin)
        j = self._rows[var.id]
        return (_as_bound(-self._m[j, 0]), _as_bound(self._m[0, j]))

    def interval(self, va: TemporalVariable, vb: TemporalVariable) -> Interval:
        """Tight interval of ``t(vb) - t(va)``."""
        for v in (va, vb):
            if not self.is_bound(v):
                raise UnknownVariableError(f"variable {v.id} is not in this network")
        self._refresh()
        if self._state is Consistency.INCONSISTENT:
            raise InconsistentNetworkError("network is inconsistent")
        a_pin = self._pins.get(va.id)
        b_pin = self._pins.get(vb.id)
        if a_pin is not None and b_pin is not None:
            d = b_pin - a_pin
            return (d, d)
        if a_pin is not None:
            lo, hi = self.variable_bounds(vb)
            return (lo - a_pin if lo > NEG_INF else NEG_INF,
                    hi - a_pin if hi < INF else INF)
        if b_pin is not None:
            lo, hi = self.variable_bounds(va)
            return (b_pin - hi if hi < INF else NEG_INF,
                    b_pin - lo if lo > NEG_INF else INF)
        ja, jb = self._rows[va.id], self._rows[vb.id]
        return (_as_bound(-self._m[jb, ja]), _as_bound(self._m[ja, jb]))

    def minimal_network(self) -> Optional[Dict[Tuple[int, int], Interval]]:
        """All-pairs tight intervals, or None when inconsistent.

        This is the reference path: a dense Floyd-Warshall over the raw
        constraint store, independent of the incremental matrix state.
        """
        if self._state is Consistency.INCONSISTENT:
            # Inconsistency is monotone: an empty intersection is recorded
            # on the flag only, never in the constraint store.
            return None
        ids = [v.id for v in self._order]
        index = {vid: i for i, vid in enumerate(ids)}
        n = len(ids)
        m = np.full((n, n), INF, dtype=np.float64)
        np.fill_diagonal(m, 0.0)
        origin_i = index[self.origin.id]
        for vid in ids:
            pin = self._pins.get(vid)
            if pin is None or vid == self.origin.id:
                continue
            i = index[vid]
            m[origin_i, i] = min(m[origin_i, i], pin)
            m[i, origin_i] = min(m[i, origin_i], -pin)
        for (a, b), (low, high) in self._cons.items():
            ia, ib = index[a], index[b]
            if high < INF and high < m[ia, ib]:
                m[ia, ib] = high
            if low > NEG_INF and -low < m[ib, ia]:
                m[ib, ia] = -low
        status = _backend.closure(m, n)
        if status != _backend.CONSISTENT:
            self._state = Consistency.INCONSISTENT
            return None
        self._refresh()
        result: Dict[Tuple[int, int], Interval] = {}
        for a in ids:
            for b in ids:
                if a == b:
                    continue
                ia, ib = index[a], index[b]
                result[(a, b)] = (_as_bound(-m[ib, ia]), _as_bound(m[ia, ib]))
        return result

    # -- structural sharing --------------------------------------------------

    def clone(self) -> "STPNetwork":
        """Copy-on-write clone behaving as an independent network."""
        other = object.__new__(STPNetwork)
        other._alloc = self._alloc
        other.origin = self.origin
        other._pins = self._pins
        other._rows = self._rows
        other._m = self._m
        other._n = self._n
        other._cons = self._cons
        other._pending = self._pending
        other._state = self._state
        other._order = self._order
        self._shared = True
        other._shared = True
        return other

    def _own(self) -> None:
        # The pin table stays shared deliberately (write-once, ids unique
        # across the lineage); everything else is branch-private.
        if not self._shared:
            return
        self._m = self._m.copy()
        self._rows = dict(self._rows)
        self._cons = dict(self._cons)
        self._pending = list(self._pending)
        self._order = list(self._order)
        self._shared = False

    def _grow(self) -> None:
        cap = self._m.shape[0] * 2
        m = np.full((cap, cap), INF, dtype=np.float64)
        np.fill_diagonal(m, 0.0)
        m[: self._n, : self._n] = self._m[: self._n, : self._n]
        self._m = m

    def __repr__(self):
        return (
            f"<STPNetwork vars={len(self._order)} cons={len(self._cons)} "
            f"state={self._state.value} backend={_backend.BACKEND}>"
        )


def _as_bound(x: float) -> float:
    if x == INF:
        return INF
    if x == NEG_INF:
        return NEG_INF
    return int(x)
