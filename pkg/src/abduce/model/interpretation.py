"""Interpretations: nodes of the search space.

An interpretation owns a set of observations, the pattern instances
explaining some of them, a temporal network all their constraints live
in, and bookkeeping for the attentional mechanism.  Explanation links and
the unexplained set partition the evidence; each observation is explained
by at most one instance.

Interpretations are value-like: the engine never mutates one after it is
enqueued.  All reasoning steps run on a fork, whose temporal network is a
copy-on-write clone, so a failed step simply discards the fork and the
parent is untouched.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Set, Tuple

from ..stpn import Outcome, STPNetwork
from ..timeunits import INF
from .grammar import PatternAutomaton, Role
from .hooks import HookContext, Span, apply_hook
from .instance import PatternInstance
from .kb import KnowledgeBase
from .observation import Observation, Provenance, bind_observation


class PreconditionError(RuntimeError):
    """An engine-side contract violation (not a search dead end)."""


@dataclass(frozen=True)
class Prediction:
    """An outstanding top-down expectation of missing evidence."""

    obs: Observation  # provenance PREDICTED
    instance_key: int
    t_index: int
    deadline: float  # latest possible begin time, ms


@dataclass(frozen=True)
class CostWeights:
    unexplained: float = 1.0
    pending: float = 0.5
    instances: float = 0.1


class Interpretation:
    __slots__ = (
        "observations",
        "instances",
        "links",
        "unexplained",
        "visited",
        "tried",
        "pending",
        "net",
        "parent",
        "evidence_times",
        "_next_uid",
        "_next_key",
    )

    def __init__(self, net: Optional[STPNetwork] = None, first_var_id: int = 0):
        self.observations: Dict[int, Observation] = {}
        self.instances: Dict[int, PatternInstance] = {}
        self.links: Dict[int, int] = {}  # obs uid -> instance key
        self.unexplained: Dict[int, Observation] = {}
        self.visited: frozenset = frozenset()
        self.tried: Dict[int, frozenset] = {}
        self.pending: Dict[int, Prediction] = {}
        self.net = net if net is not None else STPNetwork(first_var_id)
        self.parent: Optional[Interpretation] = None
        #: Sorted begin times of consumable evidence; backs gap checks.
        self.evidence_times: Tuple[float, ...] = ()
        self._next_uid = 1  # odd: evidence readers allocate even uids
        self._next_key = 0

    # -- structural sharing --------------------------------------------------

    def fork(self) -> "Interpretation":
        child = object.__new__(Interpretation)
        child.observations = dict(self.observations)
        child.instances = dict(self.instances)
        child.links = dict(self.links)
        child.unexplained = dict(self.unexplained)
        child.visited = self.visited  # frozenset: replaced, never mutated
        child.tried = dict(self.tried)
        child.pending = dict(self.pending)
        child.net = self.net.clone()
        child.parent = self
        child.evidence_times = self.evidence_times
        child._next_uid = self._next_uid
        child._next_key = self._next_key
        return child

    def alloc_uid(self) -> int:
        uid = self._next_uid
        self._next_uid = uid + 2
        return uid

    # -- ingestion -----------------------------------------------------------

    def ingest(self, obs: Observation, kb: KnowledgeBase) -> None:
        """Admit new evidence (engine-side, before enqueueing)."""
        self.observations[obs.uid] = obs
        if kb.abstractable(obs.observable):
            self.unexplained[obs.uid] = obs
            self._index_evidence_time(obs.t_low)

    def _index_evidence_time(self, t: float) -> None:
        if not self.evidence_times or t >= self.evidence_times[-1]:
            self.evidence_times = self.evidence_times + (t,)
        else:
            i = bisect.bisect_right(self.evidence_times, t)
            self.evidence_times = self.evidence_times[:i] + (t,) + self.evidence_times[i:]

    # -- reasoning primitives (called on private forks) ------------------------

    def instantiate(
        self,
        automaton: PatternAutomaton,
        kb: KnowledgeBase,
        realized_at: Optional[Tuple[int, int]] = None,
        anchor_time: Optional[int] = None,
    ) -> int:
        """Open a fresh instance; returns its key.

        The hypothesis spans its matched evidence: onset at the first
        matched begin, end at the last matched end (pinned at
        conclusion).  ``realized_at`` pins both points up front
        (single-step abstractions); ``anchor_time`` pins just the onset.
        Pinned points stay out of the propagation matrix, which keeps
        forks cheap.
        """
        key = self._next_key
        self._next_key = key + 1
        vb = self.net.new_variable()
        ve = self.net.new_variable()
        t_low: float = -INF
        if realized_at is not None:
            self.net.bind_point(vb, realized_at[0])
            self.net.bind_point(ve, realized_at[1])
            t_low = realized_at[0]
        elif anchor_time is not None:
            self.net.bind_point(vb, anchor_time)
            t_low = anchor_time
        hyp = Observation(
            uid=self.alloc_uid(),
            observable=kb.obs(automaton.hypothesis),
            begin=vb,
            end=ve,
            t_low=t_low,
            provenance=Provenance.HYPOTHESIS,
        )
        self.instances[key] = PatternInstance(key, automaton, automaton.initial, (), hyp)
        return key

    def apply_transition(self, key: int, t_index: int, obs: Observation, kb: KnowledgeBase) -> bool:
        """Advance an instance over ``obs``; False rejects the fork."""
        inst = self.instances[key]
        tr = inst.automaton.transitions[t_index]
        if tr.source != inst.state:
            raise PreconditionError(f"transition {t_index} does not leave state {inst.state!r}")
        bind_observation(self.net, obs)
        if tr.hook is not None:
            hook = kb.hooks[tr.hook]
            self._bind_referenced_hyp_points(hook, inst)
            ctx = HookContext(
                params=kb.params,
                matched=inst.matched_observations(),
                new=obs,
                hyp_begin=inst.hypothesis_obs.begin,
                hyp_end=inst.hypothesis_obs.end,
                net=self.net,
                has_gap_evidence=self._gap_scanner(kb),
            )
            if not apply_hook(hook, ctx):
                return False
        if not self.net.is_consistent():
            return False
        self.instances[key] = inst.advanced(t_index, obs)
        if tr.role is Role.ABSTRACTED:
            self.links[obs.uid] = key
            self.unexplained.pop(obs.uid, None)
            if obs.uid in self.visited:
                self.visited = self.visited - {obs.uid}
        return True

    def apply_conclude(self, key: int, kb: KnowledgeBase) -> bool:
        """Close an instance at an accepting state and realize its hypothesis."""
        inst = self.instances[key]
        if not inst.may_conclude() or not inst.matched:
            return False
        first = inst.matched_observations()[0]
        last = inst.matched_observations()[-1]
        hyp = inst.hypothesis_obs
        hyp_begin, hyp_end = hyp.begin, hyp.end
        # Unbound hypothesis points are realized on fresh handles.  Sibling
        # branches may conclude the same instance at different lengths, so
        # the (lineage-shared) pin for the end point must not be reused.
        if not self.net.is_bound(hyp_begin):
            if first.begin_time is not None:
                hyp_begin = self.net.new_variable()
                self.net.bind_point(hyp_begin, first.begin_time)
            else:
                self.net.bind_free(hyp_begin)
        if not self.net.is_bound(hyp_end):
            if last.end_time is not None:
                hyp_end = self.net.new_variable()
                self.net.bind_point(hyp_end, last.end_time)
            else:
                self.net.bind_free(hyp_end)
        if self.net.add_constraint(first.begin, hyp_begin, 0, 0) == Outcome.EMPTY_INTERSECTION:
            return False
        if self.net.add_constraint(last.end, hyp_end, 0, 0) == Outcome.EMPTY_INTERSECTION:
            return False
        if self.net.add_constraint(hyp_begin, hyp_end, 0, INF) == Outcome.EMPTY_INTERSECTION:
            return False
        if not self.net.is_consistent():
            return False
        abstracted = inst.abstracted_observations()
        source = abstracted[0] if abstracted else first
        realized = Observation(
            uid=hyp.uid,
            observable=hyp.observable,
            begin=hyp_begin,
            end=hyp_end,
            t_low=first.begin_time if first.begin_time is not None else first.t_low,
            provenance=Provenance.HYPOTHESIS,
            attributes=dict(source.attributes),
            confidence=min((o.confidence for o in abstracted), default=1.0),
            begin_time=first.begin_time,
            end_time=last.end_time,
        )
        self.instances[key] = inst.with_concluded(realized)
        self.observations[realized.uid] = realized
        if kb.abstractable(realized.observable):
            self.unexplained[realized.uid] = realized
        return True

    def apply_abort(self, key: int) -> None:
        """Retract an open instance, returning its evidence to the pool.

        Freed observations become unexplained and focusable again, with
        the retracted pattern recorded so the same branch does not retry
        it on the same observation.
        """
        inst = self.instances.pop(key)
        name = inst.automaton.name
        freed = [u for u, k in self.links.items() if k == key]
        for uid in freed:
            del self.links[uid]
            obs = self.observations[uid]
            self.unexplained[uid] = obs
            self.tried[uid] = self.tried.get(uid, frozenset()) | {name}
        if freed:
            self.visited = self.visited - set(freed)
        for uid in [u for u, p in self.pending.items() if p.instance_key == key]:
            del self.pending[uid]

    def mark_visited(self, uid: int) -> None:
        self.visited = self.visited | {uid}

    def _bind_referenced_hyp_points(self, hook, inst: PatternInstance) -> None:
        """Hypothesis points float only when a hook actually uses them
        before conclusion pins them."""
        for d in hook.directives:
            if not isinstance(d, Span):
                continue
            for ref, point in ((d.ref_a, d.point_a), (d.ref_b, d.point_b)):
                if ref != "hyp":
                    continue
                var = inst.hypothesis_obs.begin if point == "begin" else inst.hypothesis_obs.end
                if not self.net.is_bound(var):
                    self.net.bind_free(var)

    def _gap_scanner(self, kb: KnowledgeBase):
        times = self.evidence_times

        def has_gap_evidence(lo: float, hi: float) -> bool:
            i = bisect.bisect_right(times, lo)
            return i < len(times) and times[i] < hi

        return has_gap_evidence

    # -- queries ---------------------------------------------------------------

    def open_instances(self) -> Tuple[PatternInstance, ...]:
        return tuple(i for i in self.instances.values() if i.open)

    def unvisited_unexplained(self) -> Tuple[Observation, ...]:
        out = [o for uid, o in self.unexplained.items() if uid not in self.visited]
        out.sort(key=lambda o: (o.t_low, o.uid))
        return tuple(out)

    def explained_evidence(self) -> int:
        return sum(
            1
            for uid in self.links
            if self.observations[uid].provenance is Provenance.EVIDENCE
        )

    def unexplained_evidence(self) -> int:
        return sum(
            1
            for o in self.unexplained.values()
            if o.provenance is Provenance.EVIDENCE
        )

    def ancestry(self) -> Iterable["Interpretation"]:
        node: Optional[Interpretation] = self
        while node is not None:
            yield node
            node = node.parent

    def __repr__(self):
        return (
            f"<Interpretation obs={len(self.observations)} inst={len(self.instances)} "
            f"links={len(self.links)} unexplained={len(self.unexplained)} "
            f"pending={len(self.pending)}>"
        )


def interpretation_cost(interp: Interpretation, weights: CostWeights = CostWeights()) -> float:
    """Lower is better: explanatory gaps first, then unresolved
    expectations, then parsimony."""
    return (
        weights.unexplained * len(interp.unexplained)
        + weights.pending * len(interp.pending)
        + weights.instances * len(interp.instances)
    )


def match_transition(interp, inst, transition, obs, kb) -> Optional[Interpretation]:
    """Advance ``inst`` over ``obs`` in a fresh child interpretation.

    Returns the child, or None when the hook constraints are violated
    (the parent is untouched either way).  An observable mismatch is a
    caller bug, not a violation.
    """
    evidence = kb.obs(transition.evidence)
    if not obs.observable.is_a(evidence):
        raise PreconditionError(
            f"{obs.observable.name} does not satisfy expected {transition.evidence}"
        )
    t_index = inst.automaton.transitions.index(transition)
    child = interp.fork()
    if child.apply_transition(inst.key, t_index, obs, kb):
        return child
    return None
