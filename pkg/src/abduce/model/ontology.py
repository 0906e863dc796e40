"""Observable ontology: a forest of named event classes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple


@dataclass(frozen=True)
class Observable:
    """A node in the domain type hierarchy."""

    name: str
    parent: Optional["Observable"] = None

    def is_a(self, ancestor: "Observable") -> bool:
        """True iff ``ancestor`` is this observable or a transitive parent."""
        node: Optional[Observable] = self
        while node is not None:
            if node.name == ancestor.name:
                return True
            node = node.parent
        return False

    def ancestors(self) -> Iterator["Observable"]:
        node: Optional[Observable] = self
        while node is not None:
            yield node
            node = node.parent


class Ontology:
    """Registry of observables.  Acyclic by construction: a parent must be
    declared before its children, and names are unique."""

    def __init__(self):
        self._by_name: Dict[str, Observable] = {}

    def add(self, name: str, parent: Optional[str] = None) -> Observable:
        if name in self._by_name:
            raise ValueError(f"duplicate observable {name!r}")
        parent_obs = None
        if parent is not None:
            parent_obs = self._by_name.get(parent)
            if parent_obs is None:
                raise ValueError(f"unknown parent observable {parent!r} for {name!r}")
        obs = Observable(name, parent_obs)
        self._by_name[name] = obs
        return obs

    def get(self, name: str) -> Observable:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown observable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Observable]:
        return iter(self._by_name.values())

    def names(self) -> Tuple[str, ...]:
        return tuple(self._by_name)

    def is_a(self, name: str, ancestor: str) -> bool:
        return self.get(name).is_a(self.get(ancestor))
