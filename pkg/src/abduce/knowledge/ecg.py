"""Beat-level ECG knowledge base.

Evidence enters at annotation granularity: beat events with a label (N,
V, ...) and a time.  The hierarchy has an evidence side (beat
annotations, plus a low-confidence channel of sub-threshold detections)
and a hypothesis side (heartbeats, rhythms).  A single-step heartbeat
pattern lifts beat annotations to heartbeat observations; the rhythm
patterns consume heartbeats, except ventricular flutter and asystole
which work on raw beat annotations.

Every numeric window lives in the parameter table; the defaults follow
standard clinical conventions (60-100 bpm normal rate band, 0.9
prematurity ratio, and so on) and are configuration, not ground truth.
Rate-relative windows are expressed against the mean inter-beat gap the
instance has established (``*mean_rr`` bounds), falling back to
``rr_prior`` before two beats are matched.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

from ..model.grammar import GrammarRule, Role, TerminalSpec, compile_grammar
from ..model.hooks import Bound, Check, ConstraintHook, Span
from ..model.kb import KnowledgeBase
from ..model.ontology import Ontology
from ..timeunits import INF, to_ms

#: Beat annotation codes treated as supraventricular ("normal-ish") origin.
NORMAL_ORIGINS = ("N", "A", "S", "J", "F", "e", "j")
#: Codes accepted at ectopic positions ('?' covers recovered low-confidence beats).
ECTOPIC_ORIGINS = ("V", "?")

RHYTHM_NAMES = (
    "sinus-rhythm",
    "bradycardia",
    "tachycardia",
    "extrasystole",
    "couplet",
    "bigeminy",
    "trigeminy",
    "atrial-fibrillation",
    "ventricular-flutter",
    "asystole",
    "rhythm-block",
)


class Zone(Enum):
    TACHY = "tachy"
    NORMAL = "normal"
    BRADY = "brady"
    ASYSTOLE = "asystole"


@dataclass(frozen=True)
class EcgParams:
    """Clinical thresholds (ms unless dimensionless)."""

    rr_normal: Tuple[int, int] = (600, 1000)
    rr_brady_min: int = 1000
    rr_tachy_max: int = 600
    rr_asystole_min: int = 3000
    afib_rr_cv_min: float = 0.15
    premature_ratio_max: float = 0.9
    compensatory_ratio_min: float = 1.1
    flutter_rate_min: int = 180
    block_pause_ratio_min: float = 1.8

    def __post_init__(self):
        low, high = self.rr_normal
        # Zone seams may touch: the boundary itself belongs to the slower zone.
        if not (self.rr_tachy_max <= low <= high <= self.rr_brady_min < self.rr_asystole_min):
            raise ValueError("rate zones out of order: need tachy <= normal <= brady < asystole")
        for name in ("premature_ratio_max", "compensatory_ratio_min", "block_pause_ratio_min"):
            value = getattr(self, name)
            if not 0 < value < 3:
                raise ValueError(f"{name} must lie in (0, 3)")
        if not 0 < self.afib_rr_cv_min < 1:
            raise ValueError("afib_rr_cv_min must lie in (0, 1)")
        if self.flutter_rate_min <= 0:
            raise ValueError("flutter_rate_min must be positive")


def classify_rr(rr: int, params: EcgParams = EcgParams()) -> Zone:
    """Rate zone of one RR interval; boundaries belong to the slower zone."""
    if rr <= 0:
        raise ValueError(f"non-positive RR interval: {rr}")
    if rr >= params.rr_asystole_min:
        return Zone.ASYSTOLE
    if rr >= params.rr_brady_min:
        return Zone.BRADY
    if rr >= params.rr_tachy_max:
        return Zone.NORMAL
    return Zone.TACHY


def param_table(params: EcgParams) -> Dict[str, float]:
    """Flatten EcgParams plus the derived windows the grammars reference."""
    low, high = params.rr_normal
    table: Dict[str, float] = {
        "rr_normal_low": low,
        "rr_normal_high": high,
        "rr_brady_min": params.rr_brady_min,
        "rr_tachy_max": params.rr_tachy_max,
        "rr_asystole_min": params.rr_asystole_min,
        "afib_rr_cv_min": params.afib_rr_cv_min,
        "premature_ratio_max": params.premature_ratio_max,
        "compensatory_ratio_min": params.compensatory_ratio_min,
        "flutter_rate_min": params.flutter_rate_min,
        "block_pause_ratio_min": params.block_pause_ratio_min,
        # Derived windows.  Zone boundaries belong to the slower zone, so
        # the faster zone ends one ms below its threshold.
        "rr_sinus_max": params.rr_brady_min - 1,
        "rr_brady_max": params.rr_asystole_min - 1,
        "rr_tachy_high": params.rr_tachy_max - 1,
        "rr_tachy_low": 200,
        "rr_flutter_max": to_ms(60000 / params.flutter_rate_min),
        "rr_flutter_min": 150,
        "rr_afib_low": 300,
        "rr_afib_high": 1500,
        "rr_prior": (low + high) // 2,
        "premature_min": 200,
        "grid_ratio_low": 0.75,
        "grid_ratio_high": 1.25,
        "return_ratio_max": 2.0,
        "block_pause_ratio_max": params.block_pause_ratio_min + 0.4,
    }
    return table


def _ontology() -> Ontology:
    ont = Ontology()
    ont.add("observation")
    ont.add("cardiac-evidence", "observation")
    ont.add("beat-annotation", "cardiac-evidence")
    ont.add("normal-beat-ann", "beat-annotation")
    ont.add("ventricular-beat-ann", "beat-annotation")
    ont.add("low-confidence-beat", "cardiac-evidence")
    ont.add("heartbeat", "observation")
    ont.add("normal-beat", "heartbeat")
    ont.add("ventricular-beat", "heartbeat")
    ont.add("rhythm", "observation")
    for name in RHYTHM_NAMES:
        ont.add(name, "rhythm")
    return ont


def _anchor() -> Tuple[Span, ...]:
    """Pin the hypothesis onset to the first matched event."""
    return (Span("hyp", "begin", "new", "begin", Bound(0), Bound(0)),)


def _rr(low: Bound, high: Bound) -> Span:
    return Span("prev", "begin", "new", "begin", low, high)


def _normal(attr_check: str = "in") -> Check:
    return Check("in", "origin", NORMAL_ORIGINS)


def _ectopic() -> Check:
    return Check("in", "origin", ECTOPIC_ORIGINS)


def _hooks() -> Dict[str, ConstraintHook]:
    hooks = [
        # Heartbeat abstraction: the hypothesis spans exactly its beat.
        ConstraintHook("hb-anchor", (
            Span("hyp", "begin", "new", "begin", Bound(0), Bound(0)),
            Span("hyp", "end", "new", "end", Bound(0), Bound(0)),
        )),
        # Shared openers. patterns over normal beats anchor and type-check.
        ConstraintHook("first-n", _anchor() + (_normal(),)),
        ConstraintHook("first-any", _anchor()),
        # Fixed-window rate bands.
        ConstraintHook("rr-normal", (_rr(Bound("rr_normal_low"), Bound("rr_sinus_max")), _normal())),
        ConstraintHook("rr-brady", (_rr(Bound("rr_brady_min"), Bound("rr_brady_max")), _normal())),
        ConstraintHook("rr-tachy", (_rr(Bound("rr_tachy_low"), Bound("rr_tachy_high")), _normal())),
        ConstraintHook("rr-flutter", (_rr(Bound("rr_flutter_min"), Bound("rr_flutter_max")),)),
        ConstraintHook("rr-pause", (
            _rr(Bound("rr_asystole_min"), Bound(INF)),
            Check("gap_empty"),
        )),
        # Rate-relative windows against the instance's established gap.
        ConstraintHook("rr-grid", (
            _rr(Bound("grid_ratio_low", mean_scaled=True), Bound("grid_ratio_high", mean_scaled=True)),
            _normal(),
        )),
        ConstraintHook("rr-premature", (
            _rr(Bound("premature_min"), Bound("premature_ratio_max", mean_scaled=True)),
            _ectopic(),
        )),
        ConstraintHook("rr-compensatory", (
            _rr(Bound("compensatory_ratio_min", mean_scaled=True), Bound("return_ratio_max", mean_scaled=True)),
            _normal(),
        )),
        ConstraintHook("rr-block-pause", (
            _rr(Bound("block_pause_ratio_min", mean_scaled=True), Bound("block_pause_ratio_max", mean_scaled=True)),
            _normal(),
            Check("gap_empty"),
        )),
        # Irregularity: wide physiologic band plus dispersion threshold.
        ConstraintHook("rr-afib", (_rr(Bound("rr_afib_low"), Bound("rr_afib_high")), _normal())),
        ConstraintHook("rr-afib-accept", (
            _rr(Bound("rr_afib_low"), Bound("rr_afib_high")),
            _normal(),
            Check("cv_ge", None, ("afib_rr_cv_min", 8)),
        )),
    ]
    return {h.id: h for h in hooks}


def _rules(text_rules) -> Tuple[GrammarRule, ...]:
    """(head, observable, role, hook, next) tuples to GrammarRule objects."""
    out = []
    for head, observable, role, hook, nxt in text_rules:
        out.append(GrammarRule(head, TerminalSpec(observable, role, hook), nxt))
    return tuple(out)


A, E = Role.ABSTRACTED, Role.ENVIRONMENT


def _grammars():
    hb = "heartbeat"
    van = "ventricular-beat-ann"
    ban = "beat-annotation"
    lcb = "low-confidence-beat"

    def chain3(first_hook: str, next_hook: str):
        """n{3,}: three on-window beats, then an accepting loop."""
        return [
            ("S", hb, A, first_hook, "A"),
            ("A", hb, A, next_hook, "B"),
            ("B", hb, A, next_hook, "C"),
            ("B", hb, A, next_hook, None),
            ("C", hb, A, next_hook, "C"),
            ("C", hb, A, next_hook, None),
        ]

    grammars = [
        ("heartbeat", "S", [
            ("S", ban, A, "hb-anchor", None),
            ("S", lcb, A, "hb-anchor", None),
        ]),
        ("sinus-rhythm", "S", chain3("first-n", "rr-normal")),
        ("bradycardia", "S", chain3("first-n", "rr-brady")),
        ("tachycardia", "S", chain3("first-n", "rr-tachy")),
        # Isolated ectopic inside an established grid.  The context beats
        # are environment evidence: another rhythm still owns them.
        ("extrasystole", "S", [
            ("S", hb, E, "first-n", "A"),
            ("A", hb, E, "rr-grid", "B"),
            ("B", hb, A, "rr-premature", "C"),
            ("C", hb, E, "rr-compensatory", None),
        ]),
        ("couplet", "S", [
            ("S", hb, E, "first-n", "A"),
            ("A", hb, A, "rr-premature", "B"),
            ("B", hb, A, "rr-premature", "C"),
            ("C", hb, E, "rr-compensatory", None),
        ]),
        # n v n v n (v n)*
        ("bigeminy", "S", [
            ("S", hb, A, "first-n", "A"),
            ("A", hb, A, "rr-premature", "B"),
            ("B", hb, A, "rr-compensatory", "C"),
            ("C", hb, A, "rr-premature", "D"),
            ("D", hb, A, "rr-compensatory", "E"),
            ("D", hb, A, "rr-compensatory", None),
            ("E", hb, A, "rr-premature", "F"),
            ("F", hb, A, "rr-compensatory", "E"),
            ("F", hb, A, "rr-compensatory", None),
        ]),
        # (n n v){2,}
        ("trigeminy", "S", [
            ("S", hb, A, "first-n", "A"),
            ("A", hb, A, "rr-grid", "B"),
            ("B", hb, A, "rr-premature", "C"),
            ("C", hb, A, "rr-compensatory", "D"),
            ("D", hb, A, "rr-grid", "E"),
            ("E", hb, A, "rr-premature", "F"),
            ("E", hb, A, "rr-premature", None),
            ("F", hb, A, "rr-compensatory", "G"),
            ("G", hb, A, "rr-grid", "H"),
            ("H", hb, A, "rr-premature", "F"),
            ("H", hb, A, "rr-premature", None),
        ]),
        # 8+ beats in a wide band with high RR dispersion.
        ("atrial-fibrillation", "S", [
            ("S", hb, A, "first-n", "A1"),
            ("A1", hb, A, "rr-afib", "A2"),
            ("A2", hb, A, "rr-afib", "A3"),
            ("A3", hb, A, "rr-afib", "A4"),
            ("A4", hb, A, "rr-afib", "A5"),
            ("A5", hb, A, "rr-afib", "A6"),
            ("A6", hb, A, "rr-afib", "A7"),
            ("A7", hb, A, "rr-afib-accept", "A8"),
            ("A7", hb, A, "rr-afib-accept", None),
            ("A8", hb, A, "rr-afib-accept", "A8"),
            ("A8", hb, A, "rr-afib-accept", None),
        ]),
        # 4+ wide-complex beats at flutter rate (raw annotations).
        ("ventricular-flutter", "S", [
            ("S", van, A, "first-any", "A"),
            ("A", van, A, "rr-flutter", "B"),
            ("B", van, A, "rr-flutter", "C"),
            ("C", van, A, "rr-flutter", "D"),
            ("C", van, A, "rr-flutter", None),
            ("D", van, A, "rr-flutter", "D"),
            ("D", van, A, "rr-flutter", None),
        ]),
        # Two beats around a flatline-length pause (raw annotations).
        ("asystole", "S", [
            ("S", ban, A, "first-any", "A"),
            ("A", ban, A, "rr-pause", None),
        ]),
        # Dropped beat: the grid survives, so the pause terminator lands
        # near twice the established gap.
        ("rhythm-block", "S", [
            ("S", hb, E, "first-n", "A"),
            ("A", hb, E, "rr-grid", "B"),
            ("B", hb, A, "rr-block-pause", None),
        ]),
    ]
    return grammars


def build_ecg_kb(params: EcgParams = EcgParams()) -> KnowledgeBase:
    """Assemble the shipped knowledge base from a parameter set."""
    ontology = _ontology()
    automata = tuple(
        compile_grammar(_rules(rules), hypothesis, start)
        for hypothesis, start, rules in _grammars()
    )
    return KnowledgeBase(ontology, automata, _hooks(), param_table(params))
