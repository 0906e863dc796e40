"""Observations: time-interval instances of observables."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Union

from ..stpn import STPNetwork, TemporalVariable
from ..timeunits import INF

Scalar = Union[int, float, str]


class Provenance(Enum):
    EVIDENCE = "evidence"
    HYPOTHESIS = "hypothesis"
    PREDICTED = "predicted"


@dataclass(eq=False)
class Observation:
    """One observed, hypothesized or predicted event.

    ``begin``/``end`` are time-point handles valid in any network of the
    owning lineage; ``begin_time``/``end_time`` carry the exact times when
    they are known (evidence and realized hypotheses), which lets networks
    pin them instead of growing the propagation matrix.  ``t_low`` is the
    earliest possible begin time, used for deterministic ordering.
    """

    uid: int
    observable: object  # Observable
    begin: TemporalVariable
    end: TemporalVariable
    t_low: float
    provenance: Provenance
    attributes: Dict[str, Scalar] = field(default_factory=dict)
    confidence: float = 1.0
    begin_time: Optional[int] = None
    end_time: Optional[int] = None

    def __repr__(self):
        at = self.begin_time if self.begin_time is not None else f"~{self.t_low}"
        return f"<Obs#{self.uid} {self.observable.name}@{at} {self.provenance.value}>"


def bind_observation(net: STPNetwork, obs: Observation) -> None:
    """Make the observation's time points known to a network.

    Exactly-timed points are pinned; open ones become floating variables
    with the begin <= end invariant posted.  Idempotent.
    """
    if net.is_bound(obs.begin) and net.is_bound(obs.end):
        return
    if obs.begin_time is not None:
        net.bind_point(obs.begin, obs.begin_time)
    else:
        net.bind_free(obs.begin)
    if obs.end.id != obs.begin.id:
        if obs.end_time is not None:
            net.bind_point(obs.end, obs.end_time)
        else:
            net.bind_free(obs.end)
        net.add_constraint(obs.begin, obs.end, 0, INF)
