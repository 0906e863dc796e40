"""Evidence buffers with online-feed support.

The buffer holds two channels: ``primary`` detections handed to the
engine as interpretation evidence, and ``low-confidence`` candidates that
only top-down, prediction-driven queries may consult.  A horizon marks
the time up to which the record has been acquired; in online mode the
engine never looks past it.

One producer feeds the buffer while one consumer (the engine) reads it;
all operations are serialized internally so callers never coordinate.
"""

from __future__ import annotations

import threading
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

from .model.observation import Observation
from .model.ontology import Observable
from .timeunits import INF

Channel = Literal["primary", "low-confidence"]


class OutOfOrderError(ValueError):
    pass


class DeferredQuery(Exception):
    """Raised when a window reaches past the horizon in online mode; the
    caller re-asks once the horizon advances."""

    def __init__(self, needed_until: float):
        super().__init__(f"window reaches past the horizon (needs t <= {needed_until})")
        self.needed_until = needed_until


class EvidenceBuffer:
    def __init__(self, online: bool = False):
        self._items: List[Observation] = []
        self._low: List[Observation] = []
        self._horizon: float = -INF
        self._released = 0
        self._online = online
        self._lock = threading.Lock()

    @property
    def online(self) -> bool:
        return self._online

    @property
    def horizon(self) -> float:
        with self._lock:
            return self._horizon

    def push(self, obs: Observation, channel: Channel = "primary") -> None:
        """Append one observation; feeds must be time-monotone per channel."""
        with self._lock:
            lane = self._items if channel == "primary" else self._low
            if lane and obs.t_low < lane[-1].t_low:
                raise OutOfOrderError(
                    f"out-of-order push on {channel}: {obs.t_low} after {lane[-1].t_low}"
                )
            lane.append(obs)

    def advance_horizon(self, t: float) -> List[Observation]:
        """Declare the record complete up to ``t``; returns the primary
        observations that became available since the last call."""
        with self._lock:
            if t < self._horizon:
                raise ValueError(f"horizon may not move backwards ({t} < {self._horizon})")
            self._horizon = t
            fresh = []
            while self._released < len(self._items) and self._items[self._released].t_low <= t:
                fresh.append(self._items[self._released])
                self._released += 1
            return fresh

    def query_window(
        self,
        observable: Observable,
        window: Tuple[float, float],
        channels: Sequence[Channel] = ("primary", "low-confidence"),
    ) -> List[Observation]:
        """Observations of (a subtype of) ``observable`` whose begin falls
        inside ``window``, time-ordered across the selected channels."""
        low, high = window
        if low > high:
            raise ValueError(f"bad query window [{low}, {high}]")
        with self._lock:
            if self._online and high > self._horizon:
                raise DeferredQuery(high)
            out: List[Observation] = []
            for name, lane in (("primary", self._items), ("low-confidence", self._low)):
                if name not in channels:
                    continue
                for obs in lane:
                    if obs.t_low > high:
                        break
                    if obs.t_low >= low and obs.observable.is_a(observable):
                        out.append(obs)
            out.sort(key=lambda o: (o.t_low, o.uid))
            return out

    def all_items(self, channel: Channel = "primary") -> Tuple[Observation, ...]:
        with self._lock:
            lane = self._items if channel == "primary" else self._low
            return tuple(lane)

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)
