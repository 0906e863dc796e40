"""Text annotation I/O.

The format mirrors the de facto column layout of physiologic annotation
dumps: one event per line, whitespace-separated::

    time  sample  code  sub  chan  num  [aux]

``time`` is ``[hh:]mm:ss.mmm``; ``sample`` is the authoritative position
and converts to milliseconds via ``round(1000 * sample / fs)`` (half away
from zero).  Two comment header lines carry record metadata::

    # record NAME
    # fs HZ

Beat codes map to evidence observables: ``N`` to normal beats, ``V`` to
ventricular ones, ``A S J F e j`` count as supraventricular with their
code preserved in the ``origin`` attribute, and ``?`` feeds the
low-confidence channel.  Any other code passes through as an environment
observation.  Writing an interpretation emits one beat line per explained
heartbeat (code taken from ``origin``) and one ``+`` line per rhythm
onset with the rhythm mnemonic in ``aux``; unexplained evidence is
omitted.  Output is byte-stable: write-read-write is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Dict, List, Optional, Tuple

from .model.interpretation import Interpretation
from .model.kb import KnowledgeBase
from .model.observation import Observation, Provenance
from .stpn import TemporalVariable
from .timeunits import to_ms

#: Supraventricular beat codes mapped onto the normal-beat annotation type.
SUPRAVENTRICULAR = ("A", "S", "J", "F", "e", "j")

BEAT_OBSERVABLE = {
    "N": "normal-beat-ann",
    "V": "ventricular-beat-ann",
    **{code: "normal-beat-ann" for code in SUPRAVENTRICULAR},
}

LOW_CONFIDENCE_CODE = "?"

#: Rhythm aux mnemonics.  EXT, CPT, BK and ASYS are local extensions; the
#: rest follow common annotation-aux conventions.
RHYTHM_AUX = {
    "sinus-rhythm": "(N",
    "bradycardia": "(SBR",
    "tachycardia": "(SVTA",
    "bigeminy": "(B",
    "trigeminy": "(T",
    "atrial-fibrillation": "(AFIB",
    "ventricular-flutter": "(VFL",
    "asystole": "(ASYS",
    "extrasystole": "(EXT",
    "couplet": "(CPT",
    "rhythm-block": "(BK",
}


class AnnotationFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class AnnotationRecord:
    fs: float
    name: str = "record"
    entries: List[Tuple[int, str, int, int, int, Optional[str]]] = field(default_factory=list)

    def __post_init__(self):
        if self.fs <= 0:
            raise ValueError("sampling frequency must be positive")


@dataclass
class ReadResult:
    record: AnnotationRecord
    evidence: List[Observation]
    low_confidence: List[Observation]
    environment: List[Observation]


def sample_to_ms(sample: int, fs: float) -> int:
    return to_ms(1000.0 * sample / fs)


def ms_to_sample(ms: int, fs: float) -> int:
    return to_ms(fs * ms / 1000.0)


def format_time(ms: int) -> str:
    """``[hh:]mm:ss.mmm`` with hours omitted when zero."""
    hours, rest = divmod(ms, 3_600_000)
    minutes, rest = divmod(rest, 60_000)
    seconds, millis = divmod(rest, 1_000)
    if hours:
        return f"{hours}:{minutes:02d}:{seconds:02d}.{millis:03d}"
    return f"{minutes}:{seconds:02d}.{millis:03d}"


def read_annotations(source: IO[str], fs: Optional[float] = None, kb: Optional[KnowledgeBase] = None) -> ReadResult:
    """Parse an annotation stream into a record plus typed observations.

    ``fs`` overrides any ``# fs`` header; one of the two must be present.
    """
    if kb is None:
        from .knowledge import build_ecg_kb

        kb = build_ecg_kb()

    name = "record"
    header_fs: Optional[float] = None
    rows: List[Tuple[int, str, int, int, int, Optional[str]]] = []
    last_sample: Optional[int] = None

    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "record":
                name = fields[1]
            elif len(fields) == 2 and fields[0] == "fs":
                try:
                    header_fs = float(fields[1])
                except ValueError:
                    raise AnnotationFormatError(line_no, f"bad fs value {fields[1]!r}")
            continue
        fields = line.split()
        if len(fields) < 6:
            raise AnnotationFormatError(line_no, f"expected 6 or 7 columns, got {len(fields)}")
        _time, sample_s, code, sub_s, chan_s, num_s = fields[:6]
        aux = fields[6] if len(fields) > 6 else None
        try:
            sample = int(sample_s)
            sub, chan, num = int(sub_s), int(chan_s), int(num_s)
        except ValueError:
            raise AnnotationFormatError(line_no, f"non-integer field in {line!r}")
        if last_sample is not None and sample < last_sample:
            raise AnnotationFormatError(
                line_no, f"samples not monotone: {sample} after {last_sample}"
            )
        last_sample = sample
        rows.append((sample, code, sub, chan, num, aux))

    effective_fs = fs if fs is not None else header_fs
    if effective_fs is None:
        raise ValueError("no sampling frequency: pass fs or include a '# fs' header")
    record = AnnotationRecord(fs=effective_fs, name=name, entries=rows)

    evidence: List[Observation] = []
    low_confidence: List[Observation] = []
    environment: List[Observation] = []
    for index, (sample, code, sub, chan, num, aux) in enumerate(rows):
        ms = sample_to_ms(sample, effective_fs)
        uid = 2 * index  # engine-created observations take odd uids
        point = TemporalVariable(index, "event")
        if code in BEAT_OBSERVABLE:
            evidence.append(
                Observation(
                    uid=uid,
                    observable=kb.obs(BEAT_OBSERVABLE[code]),
                    begin=point,
                    end=point,
                    t_low=ms,
                    provenance=Provenance.EVIDENCE,
                    attributes={"origin": code},
                    confidence=1.0,
                    begin_time=ms,
                    end_time=ms,
                )
            )
        elif code == LOW_CONFIDENCE_CODE:
            low_confidence.append(
                Observation(
                    uid=uid,
                    observable=kb.obs("low-confidence-beat"),
                    begin=point,
                    end=point,
                    t_low=ms,
                    provenance=Provenance.EVIDENCE,
                    attributes={"origin": code},
                    confidence=0.5,
                    begin_time=ms,
                    end_time=ms,
                )
            )
        else:
            attrs: Dict[str, object] = {"code": code}
            if aux is not None:
                attrs["aux"] = aux
            environment.append(
                Observation(
                    uid=uid,
                    observable=kb.obs("cardiac-evidence"),
                    begin=point,
                    end=point,
                    t_low=ms,
                    provenance=Provenance.EVIDENCE,
                    attributes=attrs,
                    confidence=1.0,
                    begin_time=ms,
                    end_time=ms,
                )
            )
    return ReadResult(record, evidence, low_confidence, environment)


def interpretation_entries(
    interp: Interpretation, fs: float, kb: Optional[KnowledgeBase] = None
) -> List[Tuple[int, str, int, int, int, Optional[str]]]:
    """Annotation rows for an interpretation: explained beats + rhythm onsets."""
    rows: List[Tuple[int, int, Tuple[int, str, int, int, int, Optional[str]]]] = []
    for uid, key in interp.links.items():
        obs = interp.observations[uid]
        if obs.provenance is not Provenance.EVIDENCE or obs.begin_time is None:
            continue
        code = str(obs.attributes.get("origin", "N"))
        sample = ms_to_sample(obs.begin_time, fs)
        rows.append((sample, 1, (sample, code, 0, 0, 0, None)))
    for key in sorted(interp.instances):
        inst = interp.instances[key]
        if not inst.concluded:
            continue
        aux = RHYTHM_AUX.get(inst.automaton.hypothesis)
        if aux is None:
            continue
        onset = inst.hypothesis_obs.begin_time
        if onset is None:
            continue
        sample = ms_to_sample(onset, fs)
        rows.append((sample, 0, (sample, "+", 0, 0, 0, aux)))
    rows.sort(key=lambda r: (r[0], r[1], r[2][1]))
    return [row for _, _, row in rows]


def write_annotations(
    sink: IO[str],
    interp: Interpretation,
    fs: float,
    record_name: str = "record",
    kb: Optional[KnowledgeBase] = None,
) -> None:
    """Emit an interpretation in the annotation text format (byte-stable)."""
    write_entries(sink, interpretation_entries(interp, fs, kb), fs, record_name)


def write_entries(
    sink: IO[str],
    entries: List[Tuple[int, str, int, int, int, Optional[str]]],
    fs: float,
    record_name: str = "record",
) -> None:
    sink.write(f"# record {record_name}\n")
    fs_text = str(int(fs)) if float(fs).is_integer() else repr(float(fs))
    sink.write(f"# fs {fs_text}\n")
    for sample, code, sub, chan, num, aux in entries:
        ms = sample_to_ms(sample, fs)
        line = f"{format_time(ms)}\t{sample}\t{code}\t{sub}\t{chan}\t{num}"
        if aux is not None:
            line += f"\t{aux}"
        sink.write(line + "\n")
