"""Reasoning modes of the hypothesize-and-test cycle.

Four modes generate the successors of an interpretation, selected by the
attentional mechanism:

* ``abduce``   - an unexplained observation hypothesizes new pattern
  instances whose first transition consumes it.
* ``advance``  - an unexplained observation extends an already open
  instance (or lets an accepting one conclude instead).
* ``predict``  - an open instance that cannot consume the current
  observation posts a predicted observation for the evidence it expects,
  with its temporal window, to be hunted down in the acquisition buffer.
* ``subsume``  - acquired evidence replaces a predicted observation,
  confirming the top-down hypothesis.

Retraction (abort) and conclusion close instances; aborting returns the
instance's evidence to the unexplained pool so other patterns can claim
it, which is what makes conclusions amendable at any level.

Evidence may sit one abstraction level below what a transition expects
(a beat annotation offered to a rhythm that consumes heartbeats); the
``bridge`` path lifts it through a single-step pattern in the same
reasoning step, so each rhythm instance owns the beat instances it
created.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..acquisition import DeferredQuery, EvidenceBuffer
from ..model.grammar import PatternAutomaton
from ..model.hooks import HookContext, apply_hook, checks_pass
from ..model.instance import PatternInstance
from ..model.interpretation import Interpretation, Prediction
from ..model.kb import KnowledgeBase
from ..model.observation import Observation, Provenance, bind_observation
from ..timeunits import INF


@dataclass(frozen=True)
class FocusItem:
    kind: str  # "pending-prediction" | "unexplained-observation" | "open-instance"
    target: object
    deadline: Optional[float] = None


def attention_next(interp: Interpretation) -> Optional[FocusItem]:
    """Next unresolved item: predictions first (deadline order), then the
    earliest unexplained observation, then instances needing closure.
    None means the interpretation is fully resolved."""
    if interp.pending:
        uid, pred = min(interp.pending.items(), key=lambda kv: (kv[1].deadline, kv[0]))
        return FocusItem("pending-prediction", pred, pred.deadline)
    unvisited = interp.unvisited_unexplained()
    if unvisited:
        return FocusItem("unexplained-observation", unvisited[0])
    for key in sorted(interp.instances):
        if interp.instances[key].open:
            return FocusItem("open-instance", interp.instances[key])
    return None


# -- transition application with single-step bridging ------------------------


def _finish_if_closed(interp: Interpretation, key: int, kb: KnowledgeBase) -> bool:
    """Auto-conclude an instance that reached an accepting dead end."""
    inst = interp.instances[key]
    if inst.open and inst.may_conclude() and not inst.successors():
        return interp.apply_conclude(key, kb)
    return True


def _plan_step(kb: KnowledgeBase, transition, obs: Observation):
    """How ``obs`` could satisfy a transition: directly, through a
    single-step lift, or not at all (None)."""
    if obs.observable.is_a(kb.obs(transition.evidence)):
        return ("direct",)
    bridged = kb.bridge(transition.evidence, obs)
    if bridged is not None and obs.begin_time is not None:
        return ("bridge",) + bridged
    return None


def _screen(
    interp: Interpretation, inst: PatternInstance, t_index: int, obs: Observation, kb: KnowledgeBase
) -> bool:
    """Cheap pre-fork rejection: attribute/gap checks need no network, and
    a lifted observation keeps the attributes and time of its source."""
    tr = inst.automaton.transitions[t_index]
    if tr.hook is None:
        return True
    return checks_pass(
        kb.hooks[tr.hook],
        kb.params,
        inst.matched_observations(),
        obs,
        interp._gap_scanner(kb),
    )


def _step_instance(
    interp: Interpretation, key: int, t_index: int, obs: Observation, kb: KnowledgeBase, plan
) -> bool:
    """Advance instance ``key`` over ``obs`` inside ``interp`` (a private
    fork), lifting ``obs`` through a single-step pattern when the
    transition expects a higher-level observable."""
    if plan[0] == "direct":
        return interp.apply_transition(key, t_index, obs, kb) and _finish_if_closed(interp, key, kb)
    lift, lift_index = plan[1], plan[2]
    lift_key = interp.instantiate(lift, kb, realized_at=(obs.begin_time, obs.end_time))
    if not interp.apply_transition(lift_key, lift_index, obs, kb):
        return False
    if not interp.apply_conclude(lift_key, kb):
        return False
    lifted = interp.instances[lift_key].hypothesis_obs
    return interp.apply_transition(key, t_index, lifted, kb) and _finish_if_closed(interp, key, kb)


# -- reasoning modes ----------------------------------------------------------


def abduce(interp: Interpretation, obs: Observation, kb: KnowledgeBase) -> Tuple[Interpretation, ...]:
    """One child per pattern whose first transition can consume ``obs``
    (directly or lifted); children failing constraints are discarded."""
    tried = interp.tried.get(obs.uid, frozenset())
    children: List[Interpretation] = []
    for automaton in kb.automata:
        if automaton.name in tried:
            continue
        for t_index, tr in automaton.successors(automaton.initial):
            plan = _plan_step(kb, tr, obs)
            if plan is None:
                continue
            if tr.hook is not None and not checks_pass(
                kb.hooks[tr.hook], kb.params, (), obs, interp._gap_scanner(kb)
            ):
                continue
            child = interp.fork()
            realized = None
            if automaton.is_single_step() and obs.begin_time is not None:
                realized = (obs.begin_time, obs.end_time)
            key = child.instantiate(
                automaton, kb, realized_at=realized, anchor_time=obs.begin_time
            )
            if _step_instance(child, key, t_index, obs, kb, plan):
                children.append(child)
    return tuple(children)


def advance(
    interp: Interpretation, inst: PatternInstance, obs: Observation, kb: KnowledgeBase
) -> Tuple[Interpretation, ...]:
    """Children for each successor transition that accepts ``obs``, plus a
    conclusion child when the instance may stop here (the observation then
    stays for the other reasoning modes)."""
    children: List[Interpretation] = []
    for t_index, _ in inst.successors():
        plan = _plan_step(kb, inst.automaton.transitions[t_index], obs)
        if plan is None or not _screen(interp, inst, t_index, obs, kb):
            continue
        child = interp.fork()
        if _step_instance(child, inst.key, t_index, obs, kb, plan):
            children.append(child)
    if inst.may_conclude() and inst.matched:
        child = interp.fork()
        if child.apply_conclude(inst.key, kb):
            children.append(child)
    return tuple(children)


def predict(
    interp: Interpretation, inst: PatternInstance, kb: KnowledgeBase
) -> Tuple[Interpretation, ...]:
    """One child per successor transition, each carrying a predicted
    observation constrained to the transition's temporal window.

    Only instances with an established pattern (two or more matched
    events) predict: a single event carries no expectation yet.
    """
    if not inst.open or inst.closed_for_prediction or len(inst.matched) < 2:
        return ()
    if any(p.instance_key == inst.key for p in interp.pending.values()):
        return ()
    children: List[Interpretation] = []
    for t_index, tr in inst.successors():
        child = interp.fork()
        v = child.net.new_variable()
        child.net.bind_free(v)
        pred_obs = Observation(
            uid=child.alloc_uid(),
            observable=kb.obs(tr.evidence),
            begin=v,
            end=v,
            t_low=-INF,
            provenance=Provenance.PREDICTED,
            confidence=0.0,
        )
        live = child.instances[inst.key]
        if tr.hook is not None:
            ctx = HookContext(
                params=kb.params,
                matched=live.matched_observations(),
                new=pred_obs,
                hyp_begin=live.hypothesis_obs.begin,
                hyp_end=live.hypothesis_obs.end,
                net=child.net,
            )
            # Attribute checks wait for real evidence; only the temporal
            # window is posted against the predicted time point.
            if not apply_hook(kb.hooks[tr.hook], ctx, spans_only=True):
                continue
        if not child.net.is_consistent():
            continue
        low, high = child.net.variable_bounds(v)
        pred_obs.t_low = low
        child.observations[pred_obs.uid] = pred_obs
        child.pending[pred_obs.uid] = Prediction(pred_obs, inst.key, t_index, deadline=high)
        children.append(child)
    return tuple(children)


def subsume(
    interp: Interpretation, predicted: Observation, candidate: Observation, kb: KnowledgeBase
) -> Optional[Interpretation]:
    """Replace a predicted observation with acquired evidence.

    The candidate's time points are unified with the prediction's via
    equality constraints; the owning instance advances over the pending
    transition (lifting the candidate when it sits a level below).  None
    when unification is temporally inconsistent or a check fails."""
    pred = interp.pending.get(predicted.uid)
    if pred is None:
        raise ValueError("observation is not an outstanding prediction here")
    child = interp.fork()
    del child.pending[predicted.uid]
    child.observations.pop(predicted.uid, None)
    if candidate.uid not in child.observations:
        child.observations[candidate.uid] = candidate
        if kb.abstractable(candidate.observable):
            # Recovered evidence is as real as the primary kind: it counts
            # for gap checks from now on.
            child._index_evidence_time(candidate.t_low)
    bind_observation(child.net, candidate)
    child.net.add_constraint(candidate.begin, predicted.begin, 0, 0)
    child.net.add_constraint(candidate.end, predicted.end, 0, 0)
    if not child.net.is_consistent():
        return None
    inst = child.instances[pred.instance_key]
    plan = _plan_step(kb, inst.automaton.transitions[pred.t_index], candidate)
    if plan is None:
        return None
    if not _step_instance(child, pred.instance_key, pred.t_index, candidate, kb, plan):
        return None
    return child


def expire_prediction(interp: Interpretation, predicted_uid: int) -> Interpretation:
    """Withdraw an unmet prediction: the owning instance may no longer
    predict and must eventually conclude or be retracted."""
    child = interp.fork()
    pred = child.pending.pop(predicted_uid)
    child.observations.pop(predicted_uid, None)
    inst = child.instances.get(pred.instance_key)
    if inst is not None and inst.open:
        child.instances[pred.instance_key] = inst.with_prediction_closed()
    return child


# -- successor generation -----------------------------------------------------


@dataclass
class ReasoningContext:
    kb: KnowledgeBase
    buffer: EvidenceBuffer
    prediction_search: bool = True


def successors(interp: Interpretation, focus: FocusItem, ctx: ReasoningContext) -> List[Interpretation]:
    """All successor interpretations for one focus item, in a fixed order.

    Raises DeferredQuery in online mode when a prediction's window reaches
    past the acquisition horizon.
    """
    if focus.kind == "pending-prediction":
        return _prediction_successors(interp, focus.target, ctx)
    if focus.kind == "unexplained-observation":
        return _observation_successors(interp, focus.target, ctx)
    if focus.kind == "open-instance":
        return _instance_successors(interp, focus.target, ctx)
    raise ValueError(f"unknown focus kind {focus.kind!r}")


def _observation_successors(
    interp: Interpretation, obs: Observation, ctx: ReasoningContext
) -> List[Interpretation]:
    children: List[Interpretation] = []
    consumed_by: set = set()
    for key in sorted(interp.instances):
        inst = interp.instances[key]
        if not inst.open:
            continue
        got = advance(interp, inst, obs, ctx.kb)
        if got:
            children.extend(got)
            consumed_by.add(key)
    if ctx.prediction_search:
        for key in sorted(interp.instances):
            inst = interp.instances[key]
            if inst.open and key not in consumed_by:
                children.extend(predict(interp, inst, ctx.kb))
    children.extend(abduce(interp, obs, ctx.kb))
    skip = interp.fork()
    skip.mark_visited(obs.uid)
    children.append(skip)
    return children


def _prediction_successors(
    interp: Interpretation, pred: Prediction, ctx: ReasoningContext
) -> List[Interpretation]:
    children: List[Interpretation] = []
    low, high = interp.net.variable_bounds(pred.obs.begin)
    # May raise DeferredQuery in online mode: the engine re-asks later.
    candidates = _window_candidates(pred.obs, (low, high), ctx)
    for cand in candidates:
        if cand.uid in interp.links or cand.uid in interp.pending:
            continue
        child = subsume(interp, pred.obs, cand, ctx.kb)
        if child is not None:
            children.append(child)
    children.append(expire_prediction(interp, pred.obs.uid))
    return children


def _window_candidates(
    pred_obs: Observation, window, ctx: ReasoningContext
) -> List[Observation]:
    targets = [pred_obs.observable]
    # Evidence one level down also qualifies, via the single-step lift.
    for automaton in ctx.kb.automata:
        if not automaton.is_single_step():
            continue
        if not ctx.kb.obs(automaton.hypothesis).is_a(pred_obs.observable):
            continue
        for _, tr in automaton.successors(automaton.initial):
            targets.append(ctx.kb.obs(tr.evidence))
    seen = {}
    for target in targets:
        for cand in ctx.buffer.query_window(target, window):
            seen.setdefault(cand.uid, cand)
    return sorted(seen.values(), key=lambda o: (o.t_low, o.uid))


def _instance_successors(
    interp: Interpretation, inst: PatternInstance, ctx: ReasoningContext
) -> List[Interpretation]:
    if inst.may_conclude() and inst.matched:
        child = interp.fork()
        if child.apply_conclude(inst.key, ctx.kb):
            return [child]
    child = interp.fork()
    child.apply_abort(inst.key)
    return [child]
