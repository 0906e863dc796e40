"""Shipped ECG domain knowledge."""

from .ecg import (
    ECTOPIC_ORIGINS,
    NORMAL_ORIGINS,
    RHYTHM_NAMES,
    EcgParams,
    Zone,
    build_ecg_kb,
    classify_rr,
    param_table,
)
from .validate import validate_kb

__all__ = [
    "ECTOPIC_ORIGINS",
    "NORMAL_ORIGINS",
    "RHYTHM_NAMES",
    "EcgParams",
    "Zone",
    "build_ecg_kb",
    "classify_rr",
    "param_table",
    "validate_kb",
]
