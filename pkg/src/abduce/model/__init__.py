"""General data model: ontology, observations, patterns, interpretations."""

from .grammar import (
    GrammarError,
    GrammarRule,
    PatternAutomaton,
    Role,
    TerminalSpec,
    Transition,
    accepts,
    compile_grammar,
)
from .hooks import Bound, Check, ConstraintHook, HookContext, Span, apply_hook
from .instance import PatternInstance
from .interpretation import (
    CostWeights,
    Interpretation,
    PreconditionError,
    Prediction,
    interpretation_cost,
    match_transition,
)
from .kb import KnowledgeBase
from .kbio import KBFormatError, emit_kb, parse_kb
from .observation import Observation, Provenance, bind_observation
from .ontology import Observable, Ontology

__all__ = [
    "Bound",
    "Check",
    "ConstraintHook",
    "CostWeights",
    "GrammarError",
    "GrammarRule",
    "HookContext",
    "Interpretation",
    "KBFormatError",
    "KnowledgeBase",
    "Observable",
    "Observation",
    "Ontology",
    "PatternAutomaton",
    "PatternInstance",
    "PreconditionError",
    "Prediction",
    "Provenance",
    "Role",
    "Span",
    "TerminalSpec",
    "Transition",
    "accepts",
    "apply_hook",
    "bind_observation",
    "compile_grammar",
    "emit_kb",
    "interpretation_cost",
    "match_transition",
    "parse_kb",
]
