"""Simple temporal problem networks and their propagation kernels."""

from ._backend import BACKEND
from .network import (
    Consistency,
    InconsistentNetworkError,
    Outcome,
    STPNetwork,
    TemporalConstraint,
    TemporalVariable,
    UnknownVariableError,
)

__all__ = [
    "BACKEND",
    "Consistency",
    "InconsistentNetworkError",
    "Outcome",
    "STPNetwork",
    "TemporalConstraint",
    "TemporalVariable",
    "UnknownVariableError",
]
