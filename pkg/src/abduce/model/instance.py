"""Pattern instances: partial matches of an abstraction pattern."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Tuple

from .grammar import PatternAutomaton, Role, Transition
from .observation import Observation


@dataclass(frozen=True)
class PatternInstance:
    """One (possibly still open) match of an automaton.

    Advancing never mutates: each step yields a new version under the same
    key, so forked interpretations can share older versions freely.
    ``matched`` pairs transition indices with the observations that took
    them; replaying those transitions from the initial state reproduces
    ``state``.
    """

    key: int
    automaton: PatternAutomaton
    state: str
    matched: Tuple[Tuple[int, Observation], ...]
    hypothesis_obs: Observation
    concluded: bool = False
    closed_for_prediction: bool = False

    def advanced(self, t_index: int, obs: Observation) -> "PatternInstance":
        transition = self.automaton.transitions[t_index]
        return replace(
            self,
            state=transition.target,
            matched=self.matched + ((t_index, obs),),
        )

    def with_concluded(self, realized: Observation) -> "PatternInstance":
        return replace(self, concluded=True, hypothesis_obs=realized)

    def with_prediction_closed(self) -> "PatternInstance":
        return replace(self, closed_for_prediction=True)

    @property
    def open(self) -> bool:
        return not self.concluded

    def matched_observations(self) -> Tuple[Observation, ...]:
        return tuple(obs for _, obs in self.matched)

    def abstracted_observations(self) -> Tuple[Observation, ...]:
        out = []
        for t_index, obs in self.matched:
            if self.automaton.transitions[t_index].role is Role.ABSTRACTED:
                out.append(obs)
        return tuple(out)

    def successors(self) -> Tuple[Tuple[int, Transition], ...]:
        return self.automaton.successors(self.state)

    def may_conclude(self) -> bool:
        return self.automaton.may_conclude(self.state)
