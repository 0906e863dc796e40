"""Right-linear attributed grammars and their compilation to automata.

A rule is ``head -> terminal [next]`` where the terminal names an evidence
observable (plus a role and an optional constraint hook) and ``next`` is
at most one trailing non-terminal, so the grammar is right-linear by
construction and equivalent to a finite automaton: non-terminals become
states and rules become transitions.

Compilation adds an acceptance-merge pass: when every transition into a
non-terminal ``N`` is mirrored by an identical terminal-final rule, ``N``
itself is marked accepting and the mirrored sink transitions are dropped.
This removes the accept/continue non-determinism of the canonical
construction without changing the accepted language, which keeps cyclic
patterns (one instance covering an arbitrarily long run) deterministic to
match.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

ACCEPT_SINK = "$accept"


class Role(Enum):
    ABSTRACTED = "abstracted"
    ENVIRONMENT = "environment"


class GrammarError(ValueError):
    pass


class GrammarWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TerminalSpec:
    """Evidence observable reference with matching role and hook."""

    observable: str
    role: Role = Role.ABSTRACTED
    hook: Optional[str] = None


@dataclass(frozen=True)
class GrammarRule:
    head: str
    terminal: TerminalSpec
    next: Optional[str] = None


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    evidence: str
    role: Role
    hook: Optional[str]

    @property
    def terminal(self) -> TerminalSpec:
        return TerminalSpec(self.evidence, self.role, self.hook)


@dataclass(frozen=True)
class PatternAutomaton:
    """Compiled abstraction pattern.

    ``accepting`` lists the states where an instance may conclude; every
    other state obliges the instance to find more evidence.
    """

    hypothesis: str
    initial: str
    states: Tuple[str, ...]
    accepting: FrozenSet[str]
    transitions: Tuple[Transition, ...]
    rules: Tuple[GrammarRule, ...] = ()

    @property
    def name(self) -> str:
        return self.hypothesis

    def successors(self, state: str) -> Tuple[Tuple[int, Transition], ...]:
        return tuple(
            (i, t) for i, t in enumerate(self.transitions) if t.source == state
        )

    def may_conclude(self, state: str) -> bool:
        return state in self.accepting

    def is_single_step(self) -> bool:
        """True when every transition jumps straight to an accepting state
        (the automaton abstracts exactly one observation)."""
        return all(
            t.source == self.initial and t.target in self.accepting
            for t in self.transitions
        )


def compile_grammar(
    rules: Sequence[GrammarRule], hypothesis: str, start: str
) -> PatternAutomaton:
    """Compile right-linear rules into the equivalent automaton."""
    if not rules:
        raise GrammarError(f"{hypothesis}: empty rule set")
    nonterminals = {r.head for r in rules}
    if start not in nonterminals:
        raise GrammarError(f"{hypothesis}: start symbol {start!r} has no rules")
    for r in rules:
        if r.next is not None and r.next not in nonterminals:
            raise GrammarError(
                f"{hypothesis}: rule {r.head!r} references unknown non-terminal {r.next!r}"
            )
        if r.next == ACCEPT_SINK or r.head == ACCEPT_SINK:
            raise GrammarError(f"{hypothesis}: reserved state name {ACCEPT_SINK!r}")

    # Canonical construction: one state per non-terminal plus a sink.
    order: List[str] = []
    for r in rules:
        if r.head not in order:
            order.append(r.head)
    transitions: List[Transition] = []
    seen: Set[Tuple] = set()
    for r in rules:
        target = r.next if r.next is not None else ACCEPT_SINK
        key = (r.head, target, r.terminal)
        if key in seen:
            continue
        seen.add(key)
        transitions.append(
            Transition(r.head, target, r.terminal.observable, r.terminal.role, r.terminal.hook)
        )

    # Acceptance merge: mark N accepting when every way into N is mirrored
    # by an identical terminal-final rule, then drop the mirrored sink
    # transitions that became redundant.
    sink_keys = {
        (t.source, t.terminal) for t in transitions if t.target == ACCEPT_SINK
    }
    accepting: Set[str] = set()
    for n in order:
        if n == start:
            continue
        incoming = [(t.source, t.terminal) for t in transitions if t.target == n]
        if incoming and all(key in sink_keys for key in incoming):
            accepting.add(n)
    kept: List[Transition] = []
    for t in transitions:
        if t.target == ACCEPT_SINK and any(
            (o.source, o.terminal) == (t.source, t.terminal) and o.target in accepting
            for o in transitions
        ):
            continue
        kept.append(t)
    states = list(order)
    if any(t.target == ACCEPT_SINK for t in kept):
        states.append(ACCEPT_SINK)
        accepting.add(ACCEPT_SINK)

    unreachable = set(states) - _reachable(start, kept)
    if unreachable:
        warnings.warn(
            f"{hypothesis}: unreachable non-terminals {sorted(unreachable)}",
            GrammarWarning,
            stacklevel=2,
        )

    return PatternAutomaton(
        hypothesis=hypothesis,
        initial=start,
        states=tuple(states),
        accepting=frozenset(accepting),
        transitions=tuple(kept),
        rules=tuple(rules),
    )


def _reachable(start: str, transitions: Sequence[Transition]) -> Set[str]:
    seen = {start}
    frontier = deque([start])
    while frontier:
        s = frontier.popleft()
        for t in transitions:
            if t.source == s and t.target not in seen:
                seen.add(t.target)
                frontier.append(t.target)
    return seen


def accepts(
    automaton: PatternAutomaton,
    symbols: Sequence[str],
    matches: Optional[Callable[[str, str], bool]] = None,
) -> bool:
    """NFA acceptance of a label sequence.

    ``matches(symbol, evidence)`` defaults to exact name equality; pass an
    ontology-aware predicate to honour the type hierarchy.
    """
    if matches is None:
        matches = lambda sym, ev: sym == ev
    current = {automaton.initial}
    for sym in symbols:
        nxt: Set[str] = set()
        for t in automaton.transitions:
            if t.source in current and matches(sym, t.evidence):
                nxt.add(t.target)
        if not nxt:
            return False
        current = nxt
    return any(s in automaton.accepting for s in current)


def shortest_accepted_length(automaton: PatternAutomaton, limit: int) -> Optional[int]:
    """Length of the shortest accepted string, or None if above ``limit``."""
    if automaton.initial in automaton.accepting:
        return 0
    depth = {automaton.initial: 0}
    frontier = deque([automaton.initial])
    while frontier:
        s = frontier.popleft()
        d = depth[s]
        if d >= limit:
            continue
        for t in automaton.transitions:
            if t.source == s and t.target not in depth:
                depth[t.target] = d + 1
                if t.target in automaton.accepting:
                    return d + 1
                frontier.append(t.target)
    return None
