"""Time unit conventions shared by the whole engine.

All temporal quantities are integer milliseconds.  Unbounded interval
endpoints are represented by ``math.inf`` / ``-math.inf`` sentinels, never
by large finite numbers, so shortest-path sums cannot overflow.
"""

from __future__ import annotations

import math

INF = math.inf
NEG_INF = -math.inf

#: Largest finite bound the temporal solver accepts.  Keeps every
#: shortest-path sum exactly representable in a float64 mantissa.
MAX_ABS_MS = 1 << 40


def to_ms(value: float) -> int:
    """Round a time quantity to integer milliseconds, half away from zero.

    ``round()`` is unsuitable here because it rounds half to even, which
    would make sample/ms conversions depend on parity.
    """
    if value != value:
        raise ValueError("time value is NaN")
    if value in (INF, NEG_INF):
        raise ValueError("cannot convert an unbounded value to milliseconds")
    return int(math.floor(abs(value) + 0.5)) * (1 if value >= 0 else -1)


def is_finite(value: float) -> bool:
    return NEG_INF < value < INF
