"""Interpretation algorithm: reasoning modes and the heuristic search."""

from .reasoning import (
    FocusItem,
    ReasoningContext,
    abduce,
    advance,
    attention_next,
    expire_prediction,
    predict,
    subsume,
    successors,
)
from .searching import EngineConfig, Report, SearchNode, SearchState, interpret, step

__all__ = [
    "EngineConfig",
    "FocusItem",
    "ReasoningContext",
    "Report",
    "SearchNode",
    "SearchState",
    "abduce",
    "advance",
    "attention_next",
    "expire_prediction",
    "interpret",
    "predict",
    "step",
    "subsume",
    "successors",
]
