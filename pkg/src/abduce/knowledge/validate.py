"""Knowledge-base self-checks.

Returns diagnostics instead of raising: a shipped or user-supplied KB is
valid iff the list is empty.
"""

from __future__ import annotations

from typing import List

from ..model.grammar import Role, shortest_accepted_length
from ..model.hooks import Bound, Check, Span
from ..model.kb import KnowledgeBase

LANGUAGE_PROBE_DEPTH = 8


def validate_kb(kb: KnowledgeBase) -> List[str]:
    diags: List[str] = []

    seen = set()
    for obs in kb.ontology:
        # Construction forbids cycles, but a hand-built hierarchy could
        # still smuggle one in through shared Observable objects.
        chain = set()
        node = obs
        while node is not None:
            if node.name in chain:
                diags.append(f"hierarchy cycle through {node.name!r}")
                break
            chain.add(node.name)
            node = node.parent
        if obs.name in seen:
            diags.append(f"duplicate observable {obs.name!r}")
        seen.add(obs.name)

    for automaton in kb.automata:
        name = automaton.hypothesis
        if name not in kb.ontology:
            diags.append(f"{name}: hypothesis is not a declared observable")
        if not any(t.role is Role.ABSTRACTED for t in automaton.transitions):
            diags.append(f"{name}: no abstracted transition (pattern explains nothing)")
        for t in automaton.transitions:
            if t.evidence not in kb.ontology:
                diags.append(
                    f"{name}: transition {t.source}->{t.target} references "
                    f"undeclared observable {t.evidence!r}"
                )
            if t.hook is not None:
                if t.hook not in kb.hooks:
                    diags.append(f"{name}: transition {t.source}->{t.target} references unknown hook {t.hook!r}")
                else:
                    diags.extend(_check_hook_params(kb, name, t.hook))
        reachable = _reachable_states(automaton)
        for state in automaton.states:
            if state not in reachable:
                diags.append(f"{name}: state {state!r} unreachable from the initial state")
        if not _all_states_reach_accepting(automaton):
            diags.append(f"{name}: some states cannot reach an accepting state")
        if shortest_accepted_length(automaton, LANGUAGE_PROBE_DEPTH) is None:
            diags.append(
                f"{name}: empty language (no string of length <= {LANGUAGE_PROBE_DEPTH} accepted)"
            )
    return diags


def _check_hook_params(kb: KnowledgeBase, pattern: str, hook_id: str) -> List[str]:
    diags: List[str] = []
    hook = kb.hooks[hook_id]
    for d in hook.directives:
        if isinstance(d, Span):
            for bound in (d.low, d.high):
                if isinstance(bound.value, str) and bound.value not in kb.params:
                    diags.append(
                        f"{pattern}: hook {hook_id!r} references unknown parameter {bound.value!r}"
                    )
                if bound.mean_scaled and "rr_prior" not in kb.params:
                    diags.append(
                        f"{pattern}: hook {hook_id!r} uses a rate-scaled bound but no rr_prior parameter"
                    )
        elif isinstance(d, Check):
            for v in d.values:
                if d.kind in ("le", "ge", "cv_ge") and isinstance(v, str) and v not in kb.params:
                    diags.append(
                        f"{pattern}: hook {hook_id!r} check references unknown parameter {v!r}"
                    )
    return diags


def _reachable_states(automaton):
    seen = {automaton.initial}
    frontier = [automaton.initial]
    while frontier:
        s = frontier.pop()
        for t in automaton.transitions:
            if t.source == s and t.target not in seen:
                seen.add(t.target)
                frontier.append(t.target)
    return seen


def _all_states_reach_accepting(automaton) -> bool:
    # Walk the reversed transition relation from the accepting states.
    reaches = set(automaton.accepting)
    changed = True
    while changed:
        changed = False
        for t in automaton.transitions:
            if t.target in reaches and t.source not in reaches:
                reaches.add(t.source)
                changed = True
    return all(s in reaches for s in automaton.states)
