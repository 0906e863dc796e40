"""Knowledge base: the ontology, compiled patterns, hooks and parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Set, Tuple

from .grammar import PatternAutomaton, Role, Transition
from .hooks import ConstraintHook
from .observation import Observation
from .ontology import Observable, Ontology


@dataclass
class KnowledgeBase:
    ontology: Ontology
    automata: Tuple[PatternAutomaton, ...]
    hooks: Dict[str, ConstraintHook]
    params: Dict[str, float]
    _evidence_names: Set[str] = field(init=False, repr=False)
    _abstractable: Dict[str, bool] = field(init=False, repr=False)

    def __post_init__(self):
        self._evidence_names = {t.evidence for a in self.automata for t in a.transitions}
        self._abstractable = {}

    def obs(self, name: str) -> Observable:
        return self.ontology.get(name)

    def automaton(self, hypothesis: str) -> PatternAutomaton:
        for a in self.automata:
            if a.hypothesis == hypothesis:
                return a
        raise KeyError(f"no pattern for hypothesis {hypothesis!r}")

    def generalizes(self, observable: Observable, evidence_name: str) -> bool:
        """True when a transition expecting ``evidence_name`` accepts an
        observation of ``observable``."""
        return observable.is_a(self.ontology.get(evidence_name))

    def abstractable(self, observable: Observable) -> bool:
        """True when some pattern can consume an observation of this type,
        i.e. leaving it unexplained is a real explanatory gap."""
        cached = self._abstractable.get(observable.name)
        if cached is None:
            cached = any(a.name in self._evidence_names for a in observable.ancestors())
            self._abstractable[observable.name] = cached
        return cached

    def bridge(
        self, evidence_name: str, obs: Observation
    ) -> Optional[Tuple[PatternAutomaton, int]]:
        """Single-step abstraction path from ``obs`` to ``evidence_name``.

        Returns the pattern (and its transition index) whose hypothesis
        satisfies the expected evidence type and which abstracts ``obs``
        in one concluding step, e.g. a beat annotation lifted to a
        heartbeat so a rhythm-level transition can consume it.
        """
        target = self.ontology.get(evidence_name)
        if obs.observable.is_a(target):
            return None  # direct match, no bridge needed
        for a in self.automata:
            if not self.ontology.get(a.hypothesis).is_a(target):
                continue
            if not a.is_single_step():
                continue
            for i, t in a.successors(a.initial):
                if t.role is Role.ABSTRACTED and self.generalizes(obs.observable, t.evidence):
                    return (a, i)
        return None

    def restricted(self, hypotheses: Set[str]) -> "KnowledgeBase":
        """A copy keeping only the named patterns (plus their hooks)."""
        automata = tuple(a for a in self.automata if a.hypothesis in hypotheses)
        return KnowledgeBase(self.ontology, automata, dict(self.hooks), dict(self.params))
