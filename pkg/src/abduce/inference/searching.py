"""K-best-first interpretation search.

Each iteration removes the k cheapest open nodes (ties by creation
order), generates their successors through the attentional mechanism and
the reasoning modes, and inserts the consistent ones.  Fully resolved
nodes move to the solution set.  There is no duplicate detection:
interpretation states are structurally distinct by construction.  The
budget counts created interpretations.

Online mode runs the same loop against a horizon schedule.  Newly
acquired evidence is folded into every live node, which shifts all their
costs by the same amount and therefore preserves the expansion order; a
node that looks resolved (or a prediction window reaching past the
horizon) stalls until the next horizon instead of terminating.  Batch and
incremental feeding of the same record therefore expand the same tree in
the same order and produce identical output.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..acquisition import DeferredQuery, EvidenceBuffer
from ..model.interpretation import CostWeights, Interpretation, interpretation_cost
from ..model.kb import KnowledgeBase
from ..stpn import BACKEND
from ..timeunits import INF
from .reasoning import ReasoningContext, attention_next, successors


@dataclass(frozen=True)
class EngineConfig:
    k: int = 4
    max_nodes: int = 20000
    weights: CostWeights = CostWeights()
    online: bool = False
    prediction_search: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_nodes < self.k:
            raise ValueError("max_nodes must be >= k")


@dataclass
class SearchNode:
    seq: int
    depth: int
    interp: Interpretation
    cost: float

    def entry(self) -> Tuple[float, int, "SearchNode"]:
        return (self.cost, self.seq, self)


@dataclass
class Report:
    nodes_created: int = 0
    nodes_expanded: int = 0
    solutions: int = 0
    best_cost: Optional[float] = None
    explained: int = 0
    unexplained: int = 0
    incomplete: bool = False
    exhausted_budget: bool = False
    search_exhausted: bool = False
    config: Dict = field(default_factory=dict)

    def as_dict(self) -> Dict:
        return {
            "nodes_created": self.nodes_created,
            "nodes_expanded": self.nodes_expanded,
            "solutions": self.solutions,
            "best_cost": self.best_cost,
            "explained": self.explained,
            "unexplained": self.unexplained,
            "incomplete": self.incomplete,
            "exhausted_budget": self.exhausted_budget,
            "search_exhausted": self.search_exhausted,
            "config": self.config,
        }


class SearchState:
    """Priority queue, solution set, horizon schedule and counters."""

    def __init__(self, cfg: EngineConfig, kb: KnowledgeBase, buffer: EvidenceBuffer):
        self.cfg = cfg
        self.kb = kb
        self.buffer = buffer
        self.ctx = ReasoningContext(kb, buffer, cfg.prediction_search)
        self.heap: List[Tuple[float, int, SearchNode]] = []
        self.solutions: Dict[int, SearchNode] = {}
        self.in_flight: List[SearchNode] = []
        self.created = 0
        self.expanded = 0
        self.horizons: List[float] = [INF]
        self._horizon_pos = 0

    # -- horizon schedule ----------------------------------------------------

    def stream_open(self) -> bool:
        return self._horizon_pos < len(self.horizons)

    def ingest_next_horizon(self, current: Optional[SearchNode] = None) -> None:
        t = self.horizons[self._horizon_pos]
        self._horizon_pos += 1
        fresh = self.buffer.advance_horizon(t)
        live = [n for _, _, n in self.heap] + list(self.solutions.values()) + self.in_flight
        if current is not None:
            live.append(current)
        if fresh:
            for node in live:
                for obs in fresh:
                    node.interp.ingest(obs, self.kb)
                node.cost = interpretation_cost(node.interp, self.cfg.weights)
        # Former solutions may have something to explain again; rebuild the
        # heap with the shifted costs (uniform shift, order preserved).
        requeue = [n for _, _, n in self.heap] + list(self.solutions.values())
        self.solutions.clear()
        self.heap = [n.entry() for n in requeue]
        heapq.heapify(self.heap)

    # -- queue -----------------------------------------------------------------

    def push_new(self, interp: Interpretation, depth: int) -> SearchNode:
        node = SearchNode(
            self.created, depth, interp, interpretation_cost(interp, self.cfg.weights)
        )
        self.created += 1
        heapq.heappush(self.heap, node.entry())
        return node

    def push_existing(self, node: SearchNode) -> None:
        heapq.heappush(self.heap, node.entry())

    def pop(self) -> SearchNode:
        return heapq.heappop(self.heap)[2]

    def budget_left(self) -> bool:
        return self.created < self.cfg.max_nodes

    def best_solution(self) -> Optional[SearchNode]:
        return min(self.solutions.values(), key=_node_rank, default=None)

    def best_partial(self) -> Optional[SearchNode]:
        return min((n for _, _, n in self.heap), key=_node_rank, default=None)


def _node_rank(node: SearchNode) -> Tuple[float, int, int]:
    return (node.cost, -node.interp.explained_evidence(), node.seq)


def step(state: SearchState) -> None:
    """One k-best-first iteration: expand the k cheapest open nodes.

    The group is fixed before any expansion, so children created by one
    member never preempt the others within the iteration.
    """
    if not state.heap:
        raise ValueError("step on an empty queue")
    count = min(state.cfg.k, len(state.heap))
    state.in_flight = [state.pop() for _ in range(count)]
    while state.in_flight:
        if not state.budget_left():
            for node in state.in_flight:
                state.push_existing(node)
            state.in_flight = []
            return
        node = state.in_flight.pop(0)
        _expand(state, node)


def _expand(state: SearchState, node: SearchNode) -> None:
    while True:
        focus = attention_next(node.interp)
        if focus is None:
            if state.stream_open():
                # Resolved only up to the horizon; wait for the rest of the
                # record before declaring the node terminal.
                state.ingest_next_horizon(current=node)
                continue
            state.solutions[node.seq] = node
            return
        try:
            children = successors(node.interp, focus, state.ctx)
        except DeferredQuery:
            if not state.stream_open():
                raise
            state.ingest_next_horizon(current=node)
            continue
        state.expanded += 1
        for child in children:
            if not state.budget_left():
                return
            state.push_new(child, node.depth + 1)
        return


def interpret(
    kb: KnowledgeBase, buffer: EvidenceBuffer, cfg: EngineConfig = EngineConfig()
) -> Tuple[Optional[Interpretation], Report]:
    """Best explanation of the buffered evidence within the node budget.

    Returns the lowest-cost terminal interpretation (ties broken by more
    evidence explained, then earliest creation) plus a run report.  When
    no terminal interpretation fits the budget, returns the best partial
    one with the report flagged incomplete.  Deterministic for fixed
    inputs and configuration.
    """
    state = SearchState(cfg, kb, buffer)
    if cfg.online:
        times = sorted({obs.t_low for obs in buffer.all_items("primary")})
        state.horizons = list(times) + [INF]

    first_var = 0
    for channel in ("primary", "low-confidence"):
        for obs in buffer.all_items(channel):
            first_var = max(first_var, obs.begin.id + 1, obs.end.id + 1)

    root = Interpretation(first_var_id=first_var)
    first_batch = buffer.advance_horizon(state.horizons[0])
    state._horizon_pos = 1
    for obs in first_batch:
        root.ingest(obs, kb)
    state.push_new(root, 0)

    while state.heap and state.budget_left():
        step(state)

    report = Report(config=_config_dict(cfg))
    report.nodes_created = state.created
    report.nodes_expanded = state.expanded
    report.solutions = len(state.solutions)
    report.exhausted_budget = not state.budget_left()
    report.search_exhausted = not state.heap and not state.stream_open()

    best = state.best_solution()
    if best is None:
        report.incomplete = True
        best = state.best_partial()
    if best is None:
        return None, report
    report.best_cost = best.cost
    report.explained = best.interp.explained_evidence()
    report.unexplained = best.interp.unexplained_evidence()
    return best.interp, report


def _config_dict(cfg: EngineConfig) -> Dict:
    return {
        "k": cfg.k,
        "max_nodes": cfg.max_nodes,
        "weights": {
            "unexplained": cfg.weights.unexplained,
            "pending": cfg.weights.pending,
            "instances": cfg.weights.instances,
        },
        "online": cfg.online,
        "prediction_search": cfg.prediction_search,
        "stp_backend": BACKEND,
    }
