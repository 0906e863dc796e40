"""Declarative constraint hooks attached to automaton transitions.

A hook is a list of directives evaluated when a transition matches a new
observation:

* ``Span`` posts one temporal constraint between two referenced time
  points.  Bounds are literals, parameter names, or either scaled by the
  instance's mean inter-event gap (``mean_rr``), so windows can be
  relative to the rate the instance has established so far.
* ``Check`` evaluates a built-in attribute predicate (equality,
  membership, threshold) or the gap-variability predicate ``cv_ge`` used
  for irregularity detection.

Hooks are deterministic and touch nothing outside the passed context,
which keeps knowledge bases serializable and replay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

from ..stpn import Outcome, STPNetwork, TemporalVariable
from ..timeunits import INF, NEG_INF, to_ms
from .observation import Observation

REFS = ("new", "prev", "first", "hyp")
POINTS = ("begin", "end")
CHECK_KINDS = ("eq", "in", "le", "ge", "cv_ge", "gap_empty")


class HookError(ValueError):
    """A hook referenced something the context cannot supply."""


@dataclass(frozen=True)
class Bound:
    """Interval endpoint: literal or parameter, optionally rate-scaled."""

    value: Union[float, str]
    mean_scaled: bool = False

    def resolve(self, params: Mapping[str, float], mean_rr: float) -> float:
        base = params[self.value] if isinstance(self.value, str) else self.value
        if self.mean_scaled:
            return to_ms(base * mean_rr)
        if base in (INF, NEG_INF):
            return base
        return to_ms(base)


@dataclass(frozen=True)
class Span:
    ref_a: str
    point_a: str
    ref_b: str
    point_b: str
    low: Bound
    high: Bound


@dataclass(frozen=True)
class Check:
    kind: str
    attr: Optional[str] = None
    values: Tuple[Union[float, str], ...] = ()


@dataclass(frozen=True)
class ConstraintHook:
    id: str
    directives: Tuple[Union[Span, Check], ...]


@dataclass
class HookContext:
    params: Mapping[str, float]
    matched: Sequence[Observation]  # chronological, before the new one
    new: Observation
    hyp_begin: TemporalVariable
    hyp_end: TemporalVariable
    net: STPNetwork
    #: (lo, hi) -> True when some consumable evidence lies strictly inside;
    #: backs the gap_empty check used by pause-meaning patterns.
    has_gap_evidence: Optional[Callable[[float, float], bool]] = None


def mean_gap(matched: Sequence[Observation], params: Mapping[str, float]) -> float:
    """Mean gap between consecutive matched events, in ms.

    Falls back to the ``rr_prior`` parameter while the instance has fewer
    than two events, so rate-relative windows are defined from the start.
    """
    times = [o.t_low for o in matched]
    if len(times) >= 2:
        gaps = [b - a for a, b in zip(times, times[1:])]
        return sum(gaps) / len(gaps)
    try:
        return params["rr_prior"]
    except KeyError:
        raise HookError("rate-scaled bound used but no rr_prior parameter") from None


def apply_hook(hook: ConstraintHook, ctx: HookContext, spans_only: bool = False) -> bool:
    """Run every directive; False means the match is rejected.

    Temporal constraints are posted to ``ctx.net``; the caller remains
    responsible for the final network consistency check.  ``spans_only``
    posts the temporal window but defers attribute checks, for matching
    against a predicted observation that has no attributes yet.
    """
    mean = None
    for d in hook.directives:
        if isinstance(d, Check):
            if not spans_only and not _check(d, ctx):
                return False
            continue
        if mean is None and (d.low.mean_scaled or d.high.mean_scaled):
            mean = mean_gap(ctx.matched, ctx.params)
        low = d.low.resolve(ctx.params, mean if mean is not None else 0.0)
        high = d.high.resolve(ctx.params, mean if mean is not None else 0.0)
        if low > high:
            return False
        va = _point(ctx, d.ref_a, d.point_a)
        vb = _point(ctx, d.ref_b, d.point_b)
        if ctx.net.add_constraint(va, vb, low, high) == Outcome.EMPTY_INTERSECTION:
            return False
    return True


def checks_pass(
    hook: ConstraintHook,
    params: Mapping[str, float],
    matched: Sequence[Observation],
    new: Observation,
    has_gap_evidence: Optional[Callable[[float, float], bool]] = None,
) -> bool:
    """Evaluate only the Check directives (no network access).

    Checks depend on attributes and realized times alone, so callers can
    screen a candidate match before paying for a fork; ``apply_hook``
    re-evaluates them on the real context afterwards.
    """
    ctx = HookContext(params, matched, new, None, None, None, has_gap_evidence)  # type: ignore[arg-type]
    for d in hook.directives:
        if isinstance(d, Check) and not _check(d, ctx):
            return False
    return True


def _point(ctx: HookContext, ref: str, point: str) -> TemporalVariable:
    if ref == "hyp":
        return ctx.hyp_begin if point == "begin" else ctx.hyp_end
    if ref == "new":
        obs = ctx.new
    elif ref == "prev":
        if not ctx.matched:
            raise HookError("'prev' referenced on the first transition")
        obs = ctx.matched[-1]
    elif ref == "first":
        if not ctx.matched:
            raise HookError("'first' referenced on the first transition")
        obs = ctx.matched[0]
    else:
        raise HookError(f"unknown reference {ref!r}")
    return obs.begin if point == "begin" else obs.end


def _check(check: Check, ctx: HookContext) -> bool:
    if check.kind == "eq":
        return ctx.new.attributes.get(check.attr) == check.values[0]
    if check.kind == "in":
        return ctx.new.attributes.get(check.attr) in check.values
    if check.kind in ("le", "ge"):
        value = ctx.new.attributes.get(check.attr)
        if not isinstance(value, (int, float)):
            return False
        bound = check.values[0]
        if isinstance(bound, str):
            bound = ctx.params[bound]
        return value <= bound if check.kind == "le" else value >= bound
    if check.kind == "cv_ge":
        threshold, window = check.values
        if isinstance(threshold, str):
            threshold = ctx.params[threshold]
        times = [o.t_low for o in ctx.matched] + [ctx.new.t_low]
        gaps = [b - a for a, b in zip(times, times[1:])][-int(window):]
        if len(gaps) < 2:
            return False
        mu = sum(gaps) / len(gaps)
        if mu <= 0:
            return False
        var = sum((g - mu) ** 2 for g in gaps) / len(gaps)
        return math.sqrt(var) / mu >= threshold
    if check.kind == "gap_empty":
        # The stretch back to the previous matched event must hold no
        # other consumable evidence: a pause is only real when empty.
        if not ctx.matched:
            return True
        if ctx.has_gap_evidence is None:
            return True
        return not ctx.has_gap_evidence(ctx.matched[-1].t_low, ctx.new.t_low)
    raise HookError(f"unknown check kind {check.kind!r}")
