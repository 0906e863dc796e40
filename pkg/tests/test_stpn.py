"""Temporal network tests, checked against the independent oracles."""

import math
import random

import pytest

from abduce.stpn import (
    Consistency,
    InconsistentNetworkError,
    Outcome,
    STPNetwork,
    TemporalConstraint,
    TemporalVariable,
    UnknownVariableError,
)
from abduce.stpn import _kernel_py

from oracles import (
    enumerate_assignments,
    has_negative_cycle_exhaustive,
    stp_edges,
    stp_minimal,
)

INF = math.inf


def build_net(n_extra, constraints):
    """Network with variables [origin, v1..vn] and (i, j, lo, hi) constraints
    given as indices into that list."""
    net = STPNetwork()
    vs = [net.origin] + [net.add_variable() for _ in range(n_extra)]
    for a, b, lo, hi in constraints:
        net.add_constraint(vs[a], vs[b], lo, hi)
    return net, vs


def random_case(rng, max_vars=8, span=100):
    n = rng.randint(2, max_vars)
    n_cons = rng.randint(1, 2 * n)
    cons = []
    for _ in range(n_cons):
        a = rng.randrange(n)
        b = rng.randrange(n)
        while b == a:
            b = rng.randrange(n)
        lo = rng.randint(-span, span)
        hi = rng.randint(lo, span)
        cons.append((a, b, lo, hi))
    return n, cons


class TestConstruction:
    def test_fresh_network_is_consistent(self):
        net = STPNetwork()
        assert net.is_consistent()
        assert net.origin.kind == "origin"

    def test_add_variable_keeps_consistency(self):
        net = STPNetwork()
        net.add_variable()
        assert net.is_consistent()

    def test_add_variable_preserves_prior_intervals(self):
        net, vs = build_net(3, [(0, 1, 0, 10), (1, 2, 5, 5), (0, 2, 0, 8)])
        before = {v.id: net.variable_bounds(v) for v in vs[1:]}
        net.add_variable()
        assert {v.id: net.variable_bounds(v) for v in vs[1:]} == before

    def test_new_variable_is_unconstrained(self):
        net = STPNetwork()
        v = net.add_variable()
        assert net.variable_bounds(v) == (-INF, INF)

    def test_origin_bounds_are_zero(self):
        net = STPNetwork()
        assert net.variable_bounds(net.origin) == (0, 0)

    def test_constraint_rejects_empty_interval(self):
        net = STPNetwork()
        v = net.add_variable()
        with pytest.raises(ValueError):
            TemporalConstraint(net.origin, v, 5, 3)
        with pytest.raises(ValueError):
            net.add_constraint(net.origin, v, 5, 3)

    def test_unknown_variable_is_an_error(self):
        net = STPNetwork()
        stranger = TemporalVariable(999, "event")
        with pytest.raises(UnknownVariableError):
            net.add_constraint(net.origin, stranger, 0, 1)


class TestAddConstraint:
    def test_intersection_tightens(self):
        net, (o, a, b) = build_net(2, [(1, 2, 0, 10)])
        assert net.add_constraint(a, b, 5, 20) == Outcome.TIGHTENED
        assert net.interval(a, b) == (5, 10)

    def test_idempotent_add_is_unchanged(self):
        net, (o, a, b) = build_net(2, [(1, 2, 0, 10)])
        assert net.add_constraint(a, b, 0, 10) == Outcome.UNCHANGED

    def test_disjoint_add_marks_inconsistent(self):
        net, (o, a, b) = build_net(2, [(1, 2, 0, 10)])
        assert net.add_constraint(a, b, 20, 30) == Outcome.EMPTY_INTERSECTION
        assert not net.is_consistent()
        assert net.consistency_flag == Consistency.INCONSISTENT


class TestConsistency:
    def test_consistent_three_node_example(self):
        net, _ = build_net(2, [(0, 1, 0, 10), (1, 2, 5, 5), (0, 2, 0, 8)])
        assert net.is_consistent()

    def test_inconsistent_three_node_example(self):
        # B - origin >= 15 through A but <= 8 directly.
        net, _ = build_net(2, [(0, 1, 10, 20), (1, 2, 5, 10), (0, 2, 0, 8)])
        assert not net.is_consistent()

    def test_empty_network_is_consistent(self):
        assert STPNetwork().is_consistent()


class TestMinimalNetwork:
    def test_three_node_tightening(self):
        net, (o, a, b) = build_net(2, [(0, 1, 0, 10), (1, 2, 5, 5), (0, 2, 0, 8)])
        assert net.variable_bounds(a) == (0, 3)
        assert net.variable_bounds(b) == (5, 8)

    def test_single_constraint_already_tight(self):
        net, (o, a) = build_net(1, [(0, 1, 3, 7)])
        mn = net.minimal_network()
        assert mn[(o.id, a.id)] == (3, 7)

    def test_lower_and_upper_tighten_through_path(self):
        net, (o, a, b) = build_net(2, [(0, 1, 10, 20), (1, 2, 5, 10), (0, 2, 12, 25)])
        assert net.variable_bounds(b) == (15, 25)

    def test_inconsistent_returns_none(self):
        net, _ = build_net(2, [(0, 1, 10, 20), (1, 2, 5, 10), (0, 2, 0, 8)])
        assert net.minimal_network() is None

    def test_bounds_raise_on_inconsistent_network(self):
        net, (o, a, *_) = build_net(2, [(0, 1, 10, 20), (1, 2, 5, 10), (0, 2, 0, 8)])
        with pytest.raises(InconsistentNetworkError):
            net.variable_bounds(a)


class TestOracleAgreement:
    def test_minimal_network_matches_brute_force(self):
        rng = random.Random(20260810)
        for _ in range(500):
            n, cons = random_case(rng)
            net, vs = build_net(n - 1, cons)
            expected = stp_minimal(n, cons)
            got = net.minimal_network()
            if expected is None:
                assert got is None
                assert not net.is_consistent()
            else:
                assert got is not None
                remap = {
                    (i, j): got[(vs[i].id, vs[j].id)]
                    for i in range(n)
                    for j in range(n)
                    if i != j
                }
                assert remap == expected

    def test_consistency_matches_exhaustive_cycle_search(self):
        rng = random.Random(4040)
        for _ in range(120):
            n, cons = random_case(rng, max_vars=5, span=20)
            net, _ = build_net(n - 1, cons)
            expected = not has_negative_cycle_exhaustive(n, stp_edges(cons))
            assert net.is_consistent() == expected

    def test_incremental_agrees_with_batch(self):
        rng = random.Random(777)
        for _ in range(200):
            n, cons = random_case(rng)
            inc = STPNetwork()
            vs = [inc.origin] + [inc.add_variable() for _ in range(n - 1)]
            ok = True
            for a, b, lo, hi in cons:
                inc.add_constraint(vs[a], vs[b], lo, hi)
                if inc.propagate_incremental() == Consistency.INCONSISTENT:
                    ok = False
                    break
            expected = stp_minimal(n, cons)
            if not ok:
                # Prefix inconsistency implies whole-set inconsistency.
                assert expected is None
                continue
            if expected is None:
                assert not inc.is_consistent()
                continue
            for i in range(n):
                for j in range(n):
                    if i != j:
                        assert inc.interval(vs[i], vs[j]) == expected[(i, j)]

    def test_pinned_variables_agree_with_floating(self):
        rng = random.Random(99)
        for _ in range(100):
            n, cons = random_case(rng, max_vars=6, span=50)
            pins = {i: rng.randint(-50, 50) for i in range(1, n) if rng.random() < 0.5}

            pinned = STPNetwork()
            vs_p = [pinned.origin]
            for i in range(1, n):
                v = pinned.new_variable()
                if i in pins:
                    pinned.bind_point(v, pins[i])
                else:
                    pinned.bind_free(v)
                vs_p.append(v)
            for a, b, lo, hi in cons:
                pinned.add_constraint(vs_p[a], vs_p[b], lo, hi)

            all_cons = cons + [(0, i, t, t) for i, t in pins.items()]
            expected = stp_minimal(n, all_cons)
            if expected is None:
                assert not pinned.is_consistent()
                continue
            assert pinned.is_consistent()
            for i in range(n):
                for j in range(n):
                    if i != j:
                        assert pinned.interval(vs_p[i], vs_p[j]) == expected[(i, j)]


class TestProperties:
    def test_minimal_network_is_idempotent(self):
        rng = random.Random(5)
        for _ in range(50):
            n, cons = random_case(rng)
            net, _ = build_net(n - 1, cons)
            first = net.minimal_network()
            second = net.minimal_network()
            assert first == second

    def test_adding_constraints_never_widens(self):
        rng = random.Random(6)
        for _ in range(50):
            n, cons = random_case(rng, max_vars=6)
            if len(cons) < 2:
                continue
            net, vs = build_net(n - 1, cons[:-1])
            before = net.minimal_network()
            if before is None:
                continue
            a, b, lo, hi = cons[-1]
            net.add_constraint(vs[a], vs[b], lo, hi)
            after = net.minimal_network()
            if after is None:
                continue
            for pair, (lo_b, hi_b) in before.items():
                lo_a, hi_a = after[pair]
                assert lo_a >= lo_b
                assert hi_a <= hi_b

    def test_tight_endpoints_are_realizable(self):
        # Every tight bound must be achieved by some integer assignment.
        rng = random.Random(7)
        checked = 0
        while checked < 25:
            n = rng.randint(2, 4)
            cons = []
            for _ in range(rng.randint(1, 5)):
                a = rng.randrange(n)
                b = rng.randrange(n)
                while b == a:
                    b = rng.randrange(n)
                lo = rng.randint(-5, 5)
                cons.append((a, b, lo, rng.randint(lo, 5)))
            net, vs = build_net(n - 1, cons)
            mn = net.minimal_network()
            if mn is None:
                continue
            checked += 1
            span = 5 * n
            achieved = {}
            for t in enumerate_assignments(n, cons, -span, span):
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        d = t[j] - t[i]
                        lo_hi = achieved.get((i, j))
                        if lo_hi is None:
                            achieved[(i, j)] = [d, d]
                        else:
                            lo_hi[0] = min(lo_hi[0], d)
                            lo_hi[1] = max(lo_hi[1], d)
            for (i, j), (lo, hi) in achieved.items():
                tight = mn[(vs[i].id, vs[j].id)]
                if tight[0] > -INF:
                    assert tight[0] == lo
                if tight[1] < INF:
                    assert tight[1] == hi

    def test_repropagating_unchanged_edge_is_fixed_point(self):
        net, (o, a, b) = build_net(2, [(0, 1, 0, 10), (1, 2, 5, 5)])
        assert net.is_consistent()
        before = net.minimal_network()
        assert net.add_constraint(a, b, 5, 5) == Outcome.UNCHANGED
        net.propagate_incremental()
        assert net.minimal_network() == before


class TestCloneIsolation:
    def test_child_mutation_leaves_parent_intact(self):
        net, (o, a, b) = build_net(2, [(0, 1, 0, 10), (1, 2, 5, 5), (0, 2, 0, 8)])
        net.is_consistent()
        child = net.clone()
        child.add_constraint(o, a, 1, 2)
        assert child.variable_bounds(a) == (1, 2)
        assert net.variable_bounds(a) == (0, 3)

    def test_sibling_clones_are_independent(self):
        net, (o, a) = build_net(1, [(0, 1, 0, 100)])
        net.is_consistent()
        c1 = net.clone()
        c2 = net.clone()
        c1.add_constraint(o, a, 0, 10)
        c2.add_constraint(o, a, 50, 100)
        assert c1.variable_bounds(a) == (0, 10)
        assert c2.variable_bounds(a) == (50, 100)
        assert net.variable_bounds(a) == (0, 100)

    def test_clone_can_grow_independently(self):
        net = STPNetwork()
        a = net.add_variable()
        net.add_constraint(net.origin, a, 0, 5)
        net.is_consistent()
        child = net.clone()
        extra = child.add_variable()
        child.add_constraint(a, extra, 1, 1)
        assert child.variable_bounds(extra) == (1, 6)
        assert len(net.variables) == 2 and len(child.variables) == 3

    def test_variable_ids_stay_unique_across_lineage(self):
        net = STPNetwork()
        child = net.clone()
        v1 = net.add_variable()
        v2 = child.add_variable()
        assert v1.id != v2.id


class TestBackendParity:
    def test_python_kernel_matches_selected_backend(self):
        import numpy as np

        from abduce.stpn import _backend

        rng = random.Random(11)
        for _ in range(60):
            n, cons = random_case(rng, max_vars=7)
            m1 = np.full((n, n), INF)
            np.fill_diagonal(m1, 0.0)
            for a, b, w in stp_edges(cons):
                m1[a, b] = min(m1[a, b], w)
            m2 = m1.copy()
            s1 = _kernel_py.closure(m1, n)
            s2 = _backend.closure(m2, n)
            assert s1 == s2
            if s1 == _kernel_py.CONSISTENT:
                assert (m1 == m2).all()

    def test_python_update_matches_selected_backend(self):
        import numpy as np

        from abduce.stpn import _backend

        rng = random.Random(12)
        for _ in range(60):
            n, cons = random_case(rng, max_vars=7)
            if len(cons) < 2:
                continue
            base = np.full((n, n), INF)
            np.fill_diagonal(base, 0.0)
            for a, b, w in stp_edges(cons[:-1]):
                base[a, b] = min(base[a, b], w)
            if _kernel_py.closure(base, n) != _kernel_py.CONSISTENT:
                continue
            edges = stp_edges([cons[-1]])
            m1 = base.copy()
            m2 = base.copy()
            lowered = []
            for a, b, w in edges:
                if w < m1[a, b]:
                    m1[a, b] = w
                    m2[a, b] = w
                    lowered.append((a, b))
            s1 = _kernel_py.update_edges(m1, n, lowered)
            s2 = _backend.update_edges(m2, n, lowered)
            assert s1 == s2
            if s1 == _kernel_py.CONSISTENT:
                assert (m1 == m2).all()
                # One-pass update equals recomputing from scratch.
                full = np.full((n, n), INF)
                np.fill_diagonal(full, 0.0)
                for a, b, w in stp_edges(cons):
                    full[a, b] = min(full[a, b], w)
                assert _kernel_py.closure(full, n) == _kernel_py.CONSISTENT
                assert (m1 == full).all()
